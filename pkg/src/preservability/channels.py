"""Channel data model, Choi matrices, validation, adjoints and super-channels."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import unitary_group

from . import numerics, weyl
from .errors import ChannelError, DocumentError, NonUnitalError, ValidationError

FAMILIES = ("depolarizing", "dephasing", "identity", "max_mixer")
KINDS = ("kraus", "weyl_mixture", "named")

TP_TOLERANCE = 1e-10
PROB_TOLERANCE = 1e-12
STATE_TOLERANCE = 1e-10
CHECK_TOLERANCE = 1e-10


def family_weyl_probs(family, param, d):
    """Weyl-mixture table of a named family member."""
    table = np.zeros((d, d))
    if family == "identity":
        table[0, 0] = 1.0
    elif family == "max_mixer":
        table[:] = 1.0 / d**2
    elif family == "depolarizing":
        table[:] = (1.0 - param) / d**2
        table[0, 0] += param
    elif family == "dephasing":
        table[0, :] = (1.0 - param) / d
        table[0, 0] += param
    else:
        raise ValidationError(f"unknown channel family {family!r}")
    return table


@dataclass(frozen=True, eq=False)
class ChannelSpec:
    """A d-dimensional channel in one of three encodings.

    Build with ``from_kraus``, ``from_weyl_probs`` or ``named``; the
    constructor validates the encoding's invariant.
    """

    d: int
    kind: str
    kraus_ops: tuple | None = None
    weyl_probs: np.ndarray | None = None
    family: str | None = None
    param: float | None = None

    def __post_init__(self):
        d = self.d
        if int(d) != d or d < 2:
            raise ValidationError(f"dimension must be an integer >= 2, got {d!r}")
        if self.kind == "kraus":
            if not self.kraus_ops:
                raise ValidationError("kraus channel needs at least one operator")
            ops = tuple(np.array(K, dtype=np.complex128) for K in self.kraus_ops)
            for K in ops:
                if K.shape != (d, d):
                    raise ValidationError(f"Kraus operator has shape {K.shape}, expected ({d}, {d})")
                K.setflags(write=False)
            defect = tp_defect(ops)
            if defect > TP_TOLERANCE:
                raise ChannelError(f"trace-preservation defect {defect:.3e} exceeds {TP_TOLERANCE:.0e}")
            object.__setattr__(self, "kraus_ops", ops)
        elif self.kind == "weyl_mixture":
            p = np.array(self.weyl_probs, dtype=np.float64)
            if p.shape != (d, d):
                raise ValidationError(f"weyl_probs must be {d}x{d}, got shape {p.shape}")
            if p.min() < 0 or abs(p.sum() - 1.0) > PROB_TOLERANCE:
                raise ChannelError(
                    f"weyl_probs must be nonnegative and sum to 1 (min {p.min():.3e}, sum {p.sum():.15f})"
                )
            p.setflags(write=False)
            object.__setattr__(self, "weyl_probs", p)
        elif self.kind == "named":
            if self.family not in FAMILIES:
                raise ValidationError(f"unknown channel family {self.family!r}")
            param = 0.0 if self.param is None else float(self.param)
            if self.family in ("depolarizing", "dephasing") and not 0.0 <= param <= 1.0:
                raise ValidationError(f"{self.family} parameter must lie in [0, 1], got {param}")
            object.__setattr__(self, "param", param)
        else:
            raise ValidationError(f"unknown channel kind {self.kind!r}")

    @classmethod
    def from_kraus(cls, ops):
        ops = [np.asarray(K) for K in ops]
        return cls(ops[0].shape[0] if ops else 0, "kraus", kraus_ops=tuple(ops))

    @classmethod
    def from_weyl_probs(cls, probs):
        probs = np.asarray(probs, dtype=np.float64)
        if probs.ndim == 1:
            d = int(round(np.sqrt(probs.size)))
            probs = probs.reshape(d, d)
        return cls(probs.shape[0], "weyl_mixture", weyl_probs=probs)

    @classmethod
    def named(cls, family, param=0.0, d=2):
        return cls(d, "named", family=family, param=param)

    @classmethod
    def unitary(cls, U):
        return cls.from_kraus([U])

    def weyl_table(self):
        """d x d Weyl-mixture probabilities, or None for Kraus-encoded channels."""
        if self.kind == "weyl_mixture":
            return self.weyl_probs
        if self.kind == "named":
            return family_weyl_probs(self.family, self.param, self.d)
        return None

    def kraus(self):
        if self.kind == "kraus":
            return self.kraus_ops
        table = self.weyl_table().ravel()
        Ws = weyl.weyl_operators(self.d)
        return tuple(np.sqrt(p) * W for p, W in zip(table, Ws) if p > 0)

    def __repr__(self):
        if self.kind == "named":
            return f"ChannelSpec(d={self.d}, {self.family}, param={self.param})"
        if self.kind == "weyl_mixture":
            return f"ChannelSpec(d={self.d}, weyl_mixture={self.weyl_probs.ravel().tolist()})"
        return f"ChannelSpec(d={self.d}, kraus x{len(self.kraus_ops)})"


def tp_defect(ops):
    d = ops[0].shape[0]
    S = sum(K.conj().T @ K for K in ops)
    return float(np.max(np.abs(S - np.eye(d))))


def _apply_ops(ops, X):
    return sum(K @ X @ K.conj().T for K in ops)


def apply_linear(spec, X):
    """N(X) for an arbitrary d x d operator (no state validation)."""
    X = np.asarray(X, dtype=np.complex128)
    if X.shape != (spec.d, spec.d):
        raise ValidationError(f"operator shape {X.shape} does not match channel dimension {spec.d}")
    return _apply_ops(spec.kraus(), X)


def validate_state(rho, d=None, tol=STATE_TOLERANCE):
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError(f"state must be a square matrix, got shape {rho.shape}")
    if d is not None and rho.shape[0] != d:
        raise ValidationError(f"state dimension {rho.shape[0]} does not match channel dimension {d}")
    herm = numerics.hermitian_defect(rho)
    if herm > tol:
        raise ValidationError(f"state is not Hermitian (defect {herm:.3e})")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise ValidationError(f"state trace {tr:.12g} differs from 1 by more than {tol:.0e}")
    return rho


def apply(spec, rho):
    rho = validate_state(rho, spec.d)
    return apply_linear(spec, rho)


def compose(outer, inner):
    """Channel outer o inner."""
    if outer.d != inner.d:
        raise ValidationError(f"dimension mismatch: {outer.d} vs {inner.d}")
    p, q = outer.weyl_table(), inner.weyl_table()
    if p is not None and q is not None:
        return ChannelSpec.from_weyl_probs(weyl_convolve(p, q))
    ops = [A @ B for A in outer.kraus() for B in inner.kraus()]
    return kraus_from_choi(_choi_of_ops(ops, outer.d), outer.d)


def weyl_convolve(p, q):
    """Weyl table of the composition of two Weyl mixtures (phases drop under conjugation)."""
    d = p.shape[0]
    out = np.zeros((d, d))
    for a in range(d):
        for b in range(d):
            if p[a, b] != 0:
                out += p[a, b] * np.roll(np.roll(q, a, axis=0), b, axis=1)
    return out


# --- Choi -----------------------------------------------------------------


@dataclass(frozen=True)
class ChoiMatrix:
    """Choi state with the deviations of its input marginal (trace preservation)
    and output marginal (unitality) from I/d."""

    d: int
    matrix: np.ndarray
    marginal_in_defect: float
    marginal_out_defect: float

    def bell_frame(self):
        return weyl.to_bell_frame(self.matrix, self.d)

    def purity(self):
        return float(np.real(np.vdot(self.matrix, self.matrix)))


def partial_traces(J, d):
    """(Tr_out J, Tr_in J) for J on C^d (x) C^d with input first."""
    T = J.reshape(d, d, d, d)
    return np.einsum("iaja->ij", T), np.einsum("aiaj->ij", T)


def _choi_of_ops(ops, d):
    phi = weyl.max_entangled(d)
    J = np.zeros((d * d, d * d), dtype=np.complex128)
    I = np.eye(d)
    for K in ops:
        v = np.kron(I, K) @ phi
        J += np.outer(v, v.conj())
    return J


def choi(spec):
    d = spec.d
    table = spec.weyl_table()
    if table is not None:
        J = weyl.from_bell_frame(np.diag(table.ravel()).astype(np.complex128), d)
    else:
        J = _choi_of_ops(spec.kraus(), d)
    in_marginal, out_marginal = partial_traces(J, d)
    I = np.eye(d) / d
    return ChoiMatrix(d, J, float(np.max(np.abs(in_marginal - I))), float(np.max(np.abs(out_marginal - I))))


def kraus_from_choi(J, d, cutoff=1e-14):
    """Minimal Kraus set from a Choi matrix via its eigendecomposition."""
    w, V = numerics.hermitian_eig(J)
    ops = []
    for e, v in zip(w, V.T):
        if e > cutoff:
            ops.append(np.sqrt(d * e) * v.reshape(d, d).T)
    if not ops:
        raise ChannelError("Choi matrix has no positive eigenvalue")
    return ChannelSpec.from_kraus(ops)


def bell_offdiag_defect(J, d):
    M = weyl.to_bell_frame(J, d)
    return float(np.max(np.abs(M - np.diag(np.diag(M)))))


# --- properties ------------------------------------------------------------


def unital_defect(spec):
    if spec.weyl_table() is not None:
        return 0.0
    return float(np.max(np.abs(apply_linear(spec, np.eye(spec.d)) - np.eye(spec.d))))


def is_unital(spec, tol=CHECK_TOLERANCE):
    return unital_defect(spec) <= tol


def is_weyl_covariant(spec, tol=CHECK_TOLERANCE):
    if spec.weyl_table() is not None:
        return True
    return bell_offdiag_defect(choi(spec).matrix, spec.d) <= tol


def require_unital(spec, tol=CHECK_TOLERANCE):
    defect = unital_defect(spec)
    if defect > tol:
        raise NonUnitalError(f"channel is not unital: max|N(I) - I| = {defect:.3e}")


def adjoint(spec):
    """Heisenberg-picture dual. Only defined here for unital channels, whose dual is again a channel."""
    table = spec.weyl_table()
    if table is not None:
        d = spec.d
        neg = (-np.arange(d)) % d
        flipped = table[np.ix_(neg, neg)]
        if spec.kind == "named" and np.array_equal(flipped, table):
            return spec
        return ChannelSpec.from_weyl_probs(flipped)
    require_unital(spec)
    return ChannelSpec.from_kraus([K.conj().T for K in spec.kraus_ops])


# --- super-channels ----------------------------------------------------------


@dataclass(frozen=True)
class FreeSuperchannelSample:
    """Branches (p, pre, post) of  Pi(N) = sum_k p_k post_k o N o pre_k."""

    branches: tuple

    def __post_init__(self):
        branches = tuple((float(p), pre, post) for p, pre, post in self.branches)
        if not branches:
            raise ValidationError("super-channel needs at least one branch")
        probs = np.array([b[0] for b in branches])
        if probs.min() < 0 or abs(probs.sum() - 1.0) > PROB_TOLERANCE:
            raise ValidationError("branch probabilities must be nonnegative and sum to 1")
        d = branches[0][1].d
        for _, pre, post in branches:
            if pre.d != d or post.d != d:
                raise ValidationError("all branch channels must share one dimension")
        object.__setattr__(self, "branches", branches)

    @property
    def d(self):
        return self.branches[0][1].d

    def is_weyl(self):
        return all(pre.weyl_table() is not None and post.weyl_table() is not None for _, pre, post in self.branches)

    @classmethod
    def identity(cls, d):
        I = ChannelSpec.named("identity", d=d)
        return cls(((1.0, I, I),))


def apply_superchannel(sample, spec):
    if sample.d != spec.d:
        raise ValidationError(f"dimension mismatch: super-channel {sample.d} vs channel {spec.d}")
    d = spec.d
    for _, pre, post in sample.branches:
        for part in (pre, post):
            if not is_unital(part):
                raise NonUnitalError("super-channel branches must be unital")
    table = spec.weyl_table()
    if table is not None and sample.is_weyl():
        out = np.zeros((d, d))
        for p, pre, post in sample.branches:
            out += p * weyl_convolve(weyl_convolve(post.weyl_table(), table), pre.weyl_table())
        return ChannelSpec.from_weyl_probs(out / out.sum())
    J = np.zeros((d * d, d * d), dtype=np.complex128)
    for p, pre, post in sample.branches:
        if p == 0:
            continue
        ops = [A @ B @ C for A in post.kraus() for B in spec.kraus() for C in pre.kraus()]
        J += p * _choi_of_ops(ops, d)
    return kraus_from_choi(J, d)


# --- random sampling ---------------------------------------------------------


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_probs(n, rng):
    x = rng.exponential(size=n)
    return x / x.sum()


def haar_unitary(d, rng):
    return unitary_group.rvs(d, random_state=rng)


def random_channel(d, kind="weyl_mixture", seed=None):
    """Seeded random unital channel.

    ``weyl_mixture``: Dirichlet-uniform Weyl table. ``qubit_unital`` (d=2):
    Pauli mixture between two Haar unitaries. ``mixed_unitary``: mixture of
    d^2 Haar unitaries, any d.
    """
    rng = _rng(seed)
    if kind == "weyl_mixture":
        return ChannelSpec.from_weyl_probs(random_probs(d * d, rng).reshape(d, d))
    if kind == "qubit_unital":
        if d != 2:
            raise ValidationError("qubit_unital requires d=2")
        p = random_probs(4, rng)
        U, V = haar_unitary(2, rng), haar_unitary(2, rng)
        Ws = weyl.weyl_operators(2)
        return ChannelSpec.from_kraus([np.sqrt(pk) * V @ W @ U for pk, W in zip(p, Ws)])
    if kind == "mixed_unitary":
        p = random_probs(d * d, rng)
        return ChannelSpec.from_kraus([np.sqrt(pk) * haar_unitary(d, rng) for pk in p])
    raise ValidationError(f"unsupported random channel kind {kind!r} for d={d}")


def random_superchannel(d, kind="weyl_mixture", seed=None, branches=3):
    """Seeded random free super-channel with unital pre/post channels of the given kind."""
    rng = _rng(seed)
    p = random_probs(branches, rng)
    return FreeSuperchannelSample(
        tuple((pk, random_channel(d, kind, rng), random_channel(d, kind, rng)) for pk in p)
    )


# --- JSON documents ------------------------------------------------------------

_FIELDS = {"dim", "kind", "kraus", "weyl_probs", "named"}
_PAYLOAD = {"kraus": "kraus", "weyl_mixture": "weyl_probs", "named": "named"}


def _number(x, where):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise DocumentError(f"{where}: expected a number, got {type(x).__name__}")
    return float(x)


def _reject_constant(name):
    raise DocumentError(f"non-finite number {name} is not allowed")


def parse_document(text):
    """Parse and schema-check a channel document; returns a normalised dict.

    Physics (trace preservation etc.) is not checked here; see ``spec_from_document``.
    """
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise DocumentError("channel document must be a JSON object")
    unknown = set(doc) - _FIELDS
    if unknown:
        raise DocumentError(f"unknown field(s): {', '.join(sorted(unknown))}")
    for key in ("dim", "kind"):
        if key not in doc:
            raise DocumentError(f"missing required field {key!r}")
    d = doc["dim"]
    if isinstance(d, bool) or not isinstance(d, int) or d < 2:
        raise DocumentError("'dim' must be an integer >= 2")
    kind = doc["kind"]
    if kind not in _PAYLOAD:
        raise DocumentError(f"'kind' must be one of {sorted(_PAYLOAD)}, got {kind!r}")
    payload = _PAYLOAD[kind]
    if payload not in doc:
        raise DocumentError(f"kind {kind!r} requires field {payload!r}")
    extra = (set(doc) - {"dim", "kind"}) - {payload}
    if extra:
        raise DocumentError(f"field(s) {', '.join(sorted(extra))} not allowed for kind {kind!r}")

    out = {"dim": d, "kind": kind}
    if kind == "kraus":
        ops = doc["kraus"]
        if not isinstance(ops, list) or not ops:
            raise DocumentError("'kraus' must be a non-empty list of operators")
        mats = []
        for i, op in enumerate(ops):
            if not isinstance(op, list) or len(op) != d * d:
                raise DocumentError(f"kraus[{i}] must list {d * d} [re, im] entries (row-major)")
            vals = []
            for j, z in enumerate(op):
                if not isinstance(z, list) or len(z) != 2:
                    raise DocumentError(f"kraus[{i}][{j}] must be a [re, im] pair")
                vals.append(complex(_number(z[0], f"kraus[{i}][{j}]"), _number(z[1], f"kraus[{i}][{j}]")))
            mats.append(np.array(vals).reshape(d, d))
        out["kraus"] = mats
    elif kind == "weyl_mixture":
        rows = doc["weyl_probs"]
        if not isinstance(rows, list) or len(rows) != d or any(not isinstance(r, list) or len(r) != d for r in rows):
            raise DocumentError(f"'weyl_probs' must be a {d}x{d} nested list")
        out["weyl_probs"] = np.array([[_number(x, "weyl_probs") for x in r] for r in rows])
    else:
        named = doc["named"]
        if not isinstance(named, dict):
            raise DocumentError("'named' must be an object")
        bad = set(named) - {"family", "param"}
        if bad:
            raise DocumentError(f"unknown field(s) in 'named': {', '.join(sorted(bad))}")
        if "family" not in named:
            raise DocumentError("'named' requires 'family'")
        if named["family"] not in FAMILIES:
            raise DocumentError(f"unknown family {named['family']!r}")
        out["named"] = {"family": named["family"], "param": _number(named.get("param", 0.0), "named.param")}
    return out


def spec_from_document(doc):
    d, kind = doc["dim"], doc["kind"]
    if kind == "kraus":
        return ChannelSpec(d, "kraus", kraus_ops=tuple(doc["kraus"]))
    if kind == "weyl_mixture":
        return ChannelSpec(d, "weyl_mixture", weyl_probs=doc["weyl_probs"])
    return ChannelSpec.named(doc["named"]["family"], doc["named"]["param"], d)


def load_channel(text):
    return spec_from_document(parse_document(text))


def load_channel_file(path):
    with open(path, encoding="utf-8") as fh:
        return load_channel(fh.read())


def to_document(spec):
    doc = {"dim": spec.d, "kind": spec.kind}
    if spec.kind == "kraus":
        doc["kraus"] = [[[float(z.real), float(z.imag)] for z in K.ravel()] for K in spec.kraus_ops]
    elif spec.kind == "weyl_mixture":
        doc["weyl_probs"] = spec.weyl_probs.tolist()
    else:
        doc["named"] = {"family": spec.family, "param": spec.param}
    return doc


def dump_channel(spec):
    return json.dumps(to_document(spec), sort_keys=True)
