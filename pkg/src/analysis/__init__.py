# Analysis package: graph core, spectral solver, cube rounding, certifier,
# exact oracle and the tensor-power gap construction.
