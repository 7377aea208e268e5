from cayleynet.linalg import haar_unitary
from cayleynet.model import Dataset
from cayleynet.quantum import random_state


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_skew(rng, n, scale=1.0):
    m = crandn(rng, n, n) * scale
    return 0.5 * (m - m.conj().T)


def haar_dataset(n_qubits, n_pairs, target_seed=7, data_seed=100):
    u = haar_unitary(2 ** n_qubits, target_seed)
    inputs = [random_state(n_qubits, (data_seed, m)) for m in range(n_pairs)]
    return Dataset.from_unitary(u, inputs)


def is_non_increasing(values):
    return all(b <= a for a, b in zip(values, values[1:]))
