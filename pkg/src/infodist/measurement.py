"""Pure measurements: Born rule, Bayesian updating and observable instruments."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import matcore
from .contraction import Contraction, as_contraction
from .ensembles import Ensemble, density_operator
from .errors import InvalidInput, InvalidInstrument, InvalidSpec, OutcomeImpossible

IMPOSSIBLE_TOL = 1e-12
COMPLETENESS_TOL = 1e-8


def apply(m, psi) -> tuple[np.ndarray, float]:
    """Apply one outcome to a pure state.

    Returns:
        ``(post_state, probability)`` where ``probability = ||M psi||^2``.

    Raises:
        OutcomeImpossible: if the probability is at most 1e-12.
    """
    m = as_contraction(m)
    psi = np.asarray(psi, dtype=complex).ravel()
    if psi.shape[0] != m.dim:
        raise InvalidInput(f"state dim {psi.shape[0]} != contraction dim {m.dim}")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-9:
        raise InvalidInput("input state is not normalised")
    out = m.matrix @ psi
    p = float(np.vdot(out, out).real)
    if p <= IMPOSSIBLE_TOL:
        raise OutcomeImpossible(f"outcome probability {p:.3e}")
    return out / math.sqrt(p), p


def outcome_probability(m, rho) -> float:
    m = as_contraction(m)
    return float(np.real(np.trace(np.asarray(rho) @ m.effect)))


def likelihoods(e: Ensemble, m) -> np.ndarray:
    """``p(M|psi_j) = ||M psi_j||^2`` for every state of the ensemble."""
    m = as_contraction(m)
    out = e.states @ m.matrix.T
    return np.sum(np.abs(out) ** 2, axis=1)


def posterior(e: Ensemble, m) -> Ensemble:
    """Bayes update of the priors given that outcome ``m`` occurred (states unchanged)."""
    joint = e.priors * likelihoods(e, m)
    total = joint.sum()
    if total <= IMPOSSIBLE_TOL:
        raise OutcomeImpossible(f"overall outcome probability {total:.3e}")
    return e.with_priors(joint / total)


def reduced_ensemble(e: Ensemble, m) -> Ensemble:
    """Ensemble of post-measurement states ``psi_M`` with posterior priors.

    States that cannot produce the outcome keep their input vector and get
    zero weight, so indices stay aligned with ``e``.
    """
    m = as_contraction(m)
    post = posterior(e, m)
    out = e.states @ m.matrix.T
    norms = np.linalg.norm(out, axis=1)
    ok = norms**2 > IMPOSSIBLE_TOL
    states = np.array(e.states)
    states[ok] = out[ok] / norms[ok, None]
    priors = np.where(ok, post.priors, 0.0)
    return Ensemble(states, priors / priors.sum())


def information_gain(e: Ensemble, m) -> float:
    """Single-outcome information ``H(E) - H(E_M)`` in bits (can be negative)."""
    return e.entropy() - posterior(e, m).entropy()


def holevo_chi(e: Ensemble) -> float:
    # pure-state ensemble: chi reduces to S(rho)
    return matcore.von_neumann_entropy(density_operator(e))


@dataclass(frozen=True)
class PureInstrument:
    """Complete pure measurement: contractions with ``sum_i M_i^H M_i = I``."""

    outcomes: tuple[Contraction, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        outs = tuple(as_contraction(m) for m in self.outcomes)
        if not outs:
            raise InvalidInstrument("instrument has no outcomes")
        d = outs[0].dim
        if any(o.dim != d for o in outs):
            raise InvalidInstrument("outcomes have different dimensions")
        labels = tuple(self.labels) or tuple(str(i) for i in range(len(outs)))
        if len(labels) != len(outs):
            raise InvalidInstrument("one label per outcome required")
        total = sum(o.effect for o in outs)
        err = float(np.linalg.norm(total - np.eye(d)))
        if err > COMPLETENESS_TOL:
            raise InvalidInstrument(f"sum of effects differs from identity by {err:.3e}")
        object.__setattr__(self, "outcomes", outs)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.outcomes[0].dim

    def __len__(self) -> int:
        return len(self.outcomes)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "outcomes": [
                {"label": lab, "matrix": matcore.matrix_to_json(o.matrix)}
                for lab, o in zip(self.labels, self.outcomes)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> PureInstrument:
        try:
            outs = [matcore.matrix_from_json(o["matrix"]) for o in data["outcomes"]]
            labels = [str(o.get("label", i)) for i, o in enumerate(data["outcomes"])]
        except (KeyError, TypeError, AttributeError) as exc:
            raise InvalidInput(f"malformed instrument: {exc}") from exc
        return cls(tuple(outs), tuple(labels))


def average_information(e: Ensemble, inst: PureInstrument) -> float:
    """Outcome-averaged information (the mutual information), in bits."""
    rho = density_operator(e)
    total = 0.0
    for m in inst.outcomes:
        p = outcome_probability(m, rho)
        if p <= IMPOSSIBLE_TOL:
            continue
        total += p * information_gain(e, m)
    return total


@dataclass(frozen=True)
class ObservableSpec:
    """Measurement of an observable with conditional probabilities ``cond_prob[y, x]``.

    ``basis`` holds the eigenvectors ``|x>`` as columns (identity by
    default). ``backactions`` are optional unitaries ``W_y``.
    """

    cond_prob: np.ndarray
    basis: np.ndarray | None = None
    backactions: tuple[np.ndarray, ...] | None = None

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.cond_prob, dtype=float))
        if not np.all(np.isfinite(p)) or np.any(p < 0):
            raise InvalidSpec("conditional probabilities must be finite and non-negative")
        d = p.shape[1]
        if np.any(np.abs(p.sum(axis=0) - 1.0) > 1e-9):
            raise InvalidSpec("every column p(.|x) must sum to one")
        basis = np.eye(d, dtype=complex) if self.basis is None else np.asarray(self.basis, dtype=complex)
        if basis.shape != (d, d) or np.linalg.norm(matcore.dagger(basis) @ basis - np.eye(d)) > 1e-9:
            raise InvalidSpec("basis must be a d x d unitary (columns orthonormal)")
        backs = None
        if self.backactions is not None:
            backs = tuple(np.asarray(w, dtype=complex) for w in self.backactions)
            if len(backs) != p.shape[0]:
                raise InvalidSpec("one back-action unitary per outcome required")
            for w in backs:
                if w.shape != (d, d) or np.linalg.norm(matcore.dagger(w) @ w - np.eye(d)) > 1e-9:
                    raise InvalidSpec("back-actions must be d x d unitaries")
        object.__setattr__(self, "cond_prob", p)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "backactions", backs)

    @property
    def dim(self) -> int:
        return self.cond_prob.shape[1]

    @property
    def n_outcomes(self) -> int:
        return self.cond_prob.shape[0]

    def backaction(self, y: int) -> np.ndarray:
        if self.backactions is None:
            return np.eye(self.dim, dtype=complex)
        return self.backactions[y]

    def to_json(self) -> dict:
        out = {"dim": self.dim, "cond_prob": self.cond_prob.tolist()}
        if not np.allclose(self.basis, np.eye(self.dim)):
            out["basis"] = matcore.matrix_to_json(self.basis)
        if self.backactions is not None:
            out["backactions"] = [matcore.matrix_to_json(w) for w in self.backactions]
        return out

    @classmethod
    def from_json(cls, data: dict) -> ObservableSpec:
        try:
            cond = data["cond_prob"]
            basis = matcore.matrix_from_json(data["basis"]) if data.get("basis") else None
            backs = data.get("backactions")
            if backs is not None:
                backs = tuple(matcore.matrix_from_json(w) for w in backs)
        except (KeyError, TypeError, AttributeError) as exc:
            raise InvalidSpec(f"malformed observable spec: {exc}") from exc
        spec = cls(cond, basis, backs)
        if "dim" in data and int(data["dim"]) != spec.dim:
            raise InvalidSpec(f"spec dim {data['dim']} does not match cond_prob ({spec.dim})")
        return spec


def outcome_matrix(spec: ObservableSpec, y: int) -> np.ndarray:
    """``M_y = W_y sum_x sqrt(p(y|x)) |x><x|``."""
    b = spec.basis
    diag = (b * np.sqrt(spec.cond_prob[y])) @ matcore.dagger(b)
    return spec.backaction(y) @ diag


def observable_instrument(spec: ObservableSpec) -> PureInstrument:
    mats = tuple(outcome_matrix(spec, y) for y in range(spec.n_outcomes))
    return PureInstrument(mats, tuple(f"y{y}" for y in range(spec.n_outcomes)))


def outcome_ranks(spec: ObservableSpec) -> list[int]:
    """Rank of each ``M_y`` (the number of ``x`` with ``p(y|x) > 0``)."""
    return [o.rank for o in observable_instrument(spec).outcomes]


def is_complete_scan(spec: ObservableSpec) -> bool:
    """True when every outcome contraction has full rank ``d``."""
    return all(r == spec.dim for r in outcome_ranks(spec))


def is_nondegenerate(spec: ObservableSpec, tol: float = 1e-9) -> bool:
    """True when ``p(y|.)`` has a unique maximum over ``x`` for every ``y``."""
    if spec.dim < 2:
        return True
    s = np.sort(np.sqrt(spec.cond_prob), axis=1)[:, ::-1]
    return bool(np.all(s[:, 0] > s[:, 1] + tol))


def bhattacharyya_overlap(spec: ObservableSpec) -> float:
    """``B(X:Y) = sum_y [prod_x p(y|x)]^(1/d)``."""
    p = spec.cond_prob
    with np.errstate(divide="ignore"):
        logs = np.log(p)
    geo = np.where(np.any(p == 0, axis=1), 0.0, np.exp(logs.mean(axis=1)))
    return float(min(1.0, geo.sum()))


def min_reversion_probabilities(spec: ObservableSpec) -> np.ndarray:
    """``sigma_d^2(M_y) = min_x p(y|x)`` for each outcome."""
    return spec.cond_prob.min(axis=1)


@dataclass
class CascadeStep:
    step: int
    outcome: int
    posterior: list[float]
    sigma_min_sq: float
    fidelity: float

    def to_json(self) -> dict:
        return {
            "step": self.step,
            "outcome": self.outcome,
            "posterior": self.posterior,
            "sigma_min_sq": self.sigma_min_sq,
            "fidelity": self.fidelity,
        }


@dataclass
class CascadeTrace:
    true_x: int
    compensate: bool
    nondegenerate: bool
    seed: int | None
    steps: list[CascadeStep] = field(default_factory=list)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(s.to_json(), sort_keys=True) + "\n" for s in self.steps)


def cascade(spec: ObservableSpec, true_x: int, n: int, compensate: bool = False, seed=None) -> CascadeTrace:
    """Repeat the observable measurement ``n`` times on the basis state ``|x_true>``.

    The system state is tracked physically (outcomes are sampled from the
    Born rule on the current state, by inverse CDF). With ``compensate`` the
    back-action ``W_y^H`` is undone after each outcome, so the basis state is
    left untouched. The running product of applied contractions is kept
    rescaled to unit norm with its log-scale tracked separately, so long
    cascades do not underflow.
    """
    if not 0 <= true_x < spec.dim:
        raise InvalidInput(f"true_x={true_x} outside 0..{spec.dim - 1}")
    if n < 1:
        raise InvalidInput("cascade needs n >= 1")
    rng = np.random.default_rng(seed)
    d = spec.dim
    ops = []
    for y in range(spec.n_outcomes):
        m = outcome_matrix(spec, y)
        if compensate:
            m = matcore.dagger(spec.backaction(y)) @ m
        ops.append(m)
    x0 = spec.basis[:, true_x]
    state = x0.copy()
    prod = np.eye(d, dtype=complex)
    log_scale = 0.0
    trace = CascadeTrace(true_x, compensate, is_nondegenerate(spec), seed if isinstance(seed, int) else None)
    for t in range(1, n + 1):
        probs = np.array([np.linalg.norm(m @ state) ** 2 for m in ops])
        cdf = np.cumsum(probs / probs.sum())
        y = int(min(np.searchsorted(cdf, rng.random(), side="right"), len(ops) - 1))
        out = ops[y] @ state
        state = out / np.linalg.norm(out)
        prod = ops[y] @ prod
        norm = np.linalg.norm(prod, 2)
        prod /= norm
        log_scale += math.log(norm)
        cols = np.sum(np.abs(prod @ spec.basis) ** 2, axis=0)
        post = cols / cols.sum()
        smin = np.linalg.svd(prod, compute_uv=False)[-1]
        sigma_min_sq = 0.0 if smin <= 0.0 else math.exp(2 * (log_scale + math.log(smin)))
        fid = float(abs(np.vdot(x0, state)) ** 2)
        trace.steps.append(CascadeStep(t, y, [float(v) for v in post], sigma_min_sq, fid))
    return trace
