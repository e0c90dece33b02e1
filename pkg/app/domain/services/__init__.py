# Service layer - pipeline steps
