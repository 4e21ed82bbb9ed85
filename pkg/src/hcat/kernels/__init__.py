"""Twin kernel backends for the hot loops.

`hcat.kernels.njit_kernels` compiles the loops with numba;
`hcat.kernels.numpy_kernels` is a pure-numpy fallback with the same
function signatures. Callers pick a backend through
`hcat.accel.get_kernels()`, which honors the HCAT_DISABLE_NUMBA
environment flag.

Both backends guarantee the same invariants and are individually
deterministic for a given seed. Exposure counts agree exactly across
backends; the edge shuffle does not (the fallback batches proposals,
so it walks a different random sequence) and callers must not assume
bit-equal shuffles between backends.
"""
