import numpy as np
import pytest

import pccodec as pc

ABRA = [1, 2, 3, 1, 4, 1, 5, 1, 2, 3, 1]  # abracadabra with a,b,r,c,d -> 1..5


@pytest.fixture(scope="session")
def geom_env():
    return pc.make_envelope("geom", C=2, q=0.5)


@pytest.fixture(scope="session")
def geom_dist(geom_env):
    return pc.envelope_distribution(geom_env)


@pytest.fixture(scope="session")
def power_env():
    return pc.make_envelope("power", C=1, alpha=0.5)


@pytest.fixture(scope="session")
def power_dist(power_env):
    return pc.envelope_distribution(power_env)


@pytest.fixture(scope="session")
def sexp_env():
    return pc.make_envelope("sexp", C=2, Cp=1, beta=1)


@pytest.fixture(scope="session")
def sexp_dist(sexp_env):
    return pc.envelope_distribution(sexp_env)


def bits_of(stream) -> str:
    return "".join(str(stream.peek_bit(i)) for i in range(len(stream)))


def build_corpus(count: int, max_len: int, seed: int):
    """Deterministic mixed corpus: envelope laws plus perturbed class members,
    log-uniform lengths in [0, max_len] with the edge cases pinned."""
    rng = np.random.default_rng(seed)
    dists = [
        pc.envelope_distribution(pc.make_envelope("geom", C=2, q=0.5)),
        pc.envelope_distribution(pc.make_envelope("power", C=1, alpha=0.5)),
        pc.envelope_distribution(pc.make_envelope("sexp", C=2, Cp=1, beta=1)),
    ]
    members = [pc.perturbed_member(d, seed=seed + i) for i, d in enumerate(dists)]
    laws = dists + members
    out = []
    for i in range(count):
        if i == 0:
            n = 0
        elif i == 1:
            n = 1
        elif i == 2:
            n = max_len
        else:
            n = int(np.exp(rng.uniform(0.0, np.log(max_len))))
        law = laws[i % len(laws)]
        out.append((f"{law.label}#{i}:n={n}", law.sample(n, seed + 1000 + i)))
    return out
