"""Core computation modules: trajectories, MSI, smoothing, augmentation, slices."""
