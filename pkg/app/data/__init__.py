# Data layer - record types and file-backed repositories
