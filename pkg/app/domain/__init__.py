# Domain layer - autodiff, model, baselines, metrics and services
