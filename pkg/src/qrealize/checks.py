"""Verification engines: class membership, commutation preservation,
physical realizability, Hamiltonian extraction, generator reconstruction,
lossless and storage-function conditions.

Every engine returns a :class:`CheckReport` whose conditions carry symbolic
residuals; in exact mode a passing condition has residual exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    Algebra,
    OperatorPolynomial,
    render,
    wirtinger_gradient,
)
from .matrices import (
    OperatorMatrix,
    matrix_vector_commutators,
    outer_commutator,
    row_commutator,
    scalar_vec_commutator,
)
from .model import DoubledModel, NoiseSpec, QsdeModel, double, structural_class_check
from .scalars import (
    Scalar,
    block_diag,
    grid_adjoint,
    grid_inverse,
    grid_neg,
    grid_scale,
    grid_transpose,
    identity_grid,
)


@dataclass
class Condition:
    condition_id: str
    description: str
    passed: bool
    residual_norm: float
    witness: list
    # asserted-zero residual polynomials, kept for numerical re-verification
    residuals: list = field(default_factory=list, repr=False)

    def to_dict(self):
        return {
            "condition_id": self.condition_id,
            "description": self.description,
            "pass": self.passed,
            "residual_norm": self.residual_norm,
            "witness": self.witness,
        }


@dataclass
class CheckReport:
    model_id: str
    conditions: list
    derived: dict | None = None

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.conditions)

    def condition(self, condition_id: str) -> Condition:
        for c in self.conditions:
            if c.condition_id == condition_id:
                return c
        raise KeyError(condition_id)

    def merged_with(self, other: "CheckReport") -> "CheckReport":
        derived = dict(self.derived or {})
        derived.update(other.derived or {})
        return CheckReport(
            model_id=self.model_id,
            conditions=self.conditions + other.conditions,
            derived=derived or None,
        )

    def to_dict(self):
        out = {
            "model_id": self.model_id,
            "overall": self.overall,
            "checks": [c.to_dict() for c in self.conditions],
        }
        if self.derived is not None:
            derived = {}
            for key, value in self.derived.items():
                if isinstance(value, OperatorPolynomial):
                    derived[key] = render(value)
                elif isinstance(value, list):
                    derived[key] = [
                        render(v) if isinstance(v, OperatorPolynomial) else v
                        for v in value
                    ]
                else:
                    derived[key] = value
            out["derived"] = derived
        return out


def _residual_condition(cid, desc, labelled_residuals):
    """Build a condition from [(label, residual polynomial), ...]."""
    nonzero = [(lab, p) for lab, p in labelled_residuals if not p.is_zero]
    return Condition(
        condition_id=cid,
        description=desc,
        passed=not nonzero,
        residual_norm=max((p.coeff_norm() for _, p in labelled_residuals), default=0.0),
        witness=[{"entry": lab, "residual": render(p)} for lab, p in nonzero],
        residuals=[p for _, p in labelled_residuals],
    )


def _matrix_residual(cid, desc, mat: OperatorMatrix):
    labelled = [
        (f"({i + 1},{j + 1})", mat.entry(i, j))
        for i in range(mat.rows)
        for j in range(mat.cols)
    ]
    return _residual_condition(cid, desc, labelled)


def _mode_vector(alg: Algebra) -> OperatorMatrix:
    return OperatorMatrix.column(
        alg, [alg.annihilator(j) for j in range(1, alg.modes + 1)]
    )


def _half(p_or_m):
    return p_or_m.scale(Scalar(Fraction(1, 2)))


# -- Definition-class membership ----------------------------------------------

def generator_identity_parts(model: QsdeModel, dm: DoubledModel | None = None):
    """The two bracket terms and the right-hand side of the class identity.

    Returns (term1, term2, rhs) where the identity asserts
    term1 - term2 = rhs = Abar - (1/2) Bbar Cbar.
    """
    alg = model.algebra
    dm = dm or double(model)
    nbar = dm.nbar if dm.nbar is not None else 1
    j_inv = OperatorMatrix.from_scalars(alg, grid_inverse(dm.J))
    s1 = (dm.Abar.adjoint() @ j_inv @ dm.abar).entry(0, 0)
    s2 = (dm.abar.adjoint() @ j_inv @ dm.Abar).entry(0, 0)
    factor = Scalar(Fraction(1, 2 * nbar))
    term1 = scalar_vec_commutator(s1, dm.abar).scale(factor)
    term2 = scalar_vec_commutator(s2, dm.abar).scale(factor)
    rhs = dm.Abar - _half(dm.Bbar @ dm.Cbar)
    return term1, term2, rhs


def check_class(model: QsdeModel, model_id: str = "model") -> CheckReport:
    """Membership conditions for the admissible model class."""
    alg = model.algebra
    a_vec = _mode_vector(alg)
    dm = double(model)
    conditions = []

    b_res = matrix_vector_commutators(model.B, a_vec)
    conditions.append(
        _residual_condition(
            "CLASS-B-commutes",
            "every entry of B commutes with every mode operator",
            [(f"B[{i},{j}] vs a{k}", p) for (i, j, k), p in b_res] or [("all", alg.zero())],
        )
    )
    c_res = matrix_vector_commutators(model.C, a_vec)
    conditions.append(
        _residual_condition(
            "CLASS-C-commutes",
            "every entry of C commutes with every mode operator",
            [(f"C[{i}] vs a{k}", p) for (i, j, k), p in c_res] or [("all", alg.zero())],
        )
    )

    row_a = row_commutator(model.A, a_vec)
    conditions.append(
        _matrix_residual(
            "CLASS-A-antisymmetry",
            "the drift commutator matrix [A_j, a_k] is symmetric",
            row_a - row_a.transpose(),
        )
    )

    violations = structural_class_check(model)
    conditions.append(
        Condition(
            condition_id="CLASS-structure",
            description="drift and output monomials have the admissible single-mode form",
            passed=not violations,
            residual_norm=0.0,
            witness=[{"entry": v, "residual": "structural"} for v in violations],
        )
    )

    term1, term2, rhs = generator_identity_parts(model, dm)
    conditions.append(
        _matrix_residual(
            "CLASS-generator-identity",
            "the graded commutator identity reproduces Abar - (1/2) Bbar Cbar",
            (term1 - term2) - rhs,
        )
    )
    return CheckReport(model_id=model_id, conditions=conditions)


# -- commutation preservation -------------------------------------------------

def check_preservation(
    model: QsdeModel,
    noise: NoiseSpec | None = None,
    model_id: str = "model",
    id_prefix: str = "CCR",
) -> CheckReport:
    """Differential conditions for preservation of the commutation relations."""
    alg = model.algebra
    dm = double(model)
    t_grid = (noise or NoiseSpec.default(model.m)).T
    t_mat = OperatorMatrix.from_scalars(alg, t_grid)

    total = (
        outer_commutator(dm.Abar, dm.abar)
        + outer_commutator(dm.abar, dm.Abar)
        + dm.Bbar @ t_mat @ dm.Bbar.adjoint()
    )
    conditions = [
        _matrix_residual(
            f"{id_prefix}-sum",
            "[Abar, abar'] + [abar, Abar'] + Bbar T Bbar' vanishes",
            total,
        )
    ]
    b_left = matrix_vector_commutators(dm.Bbar, dm.abar, dagger=True)
    conditions.append(
        _residual_condition(
            f"{id_prefix}-B-left",
            "every entry of Bbar commutes with every doubled creation generator",
            [(f"Bbar[{i},{j}] vs abar{k}'", p) for (i, j, k), p in b_left]
            or [("all", alg.zero())],
        )
    )
    b_right = matrix_vector_commutators(dm.Bbar.adjoint(), dm.abar)
    conditions.append(
        _residual_condition(
            f"{id_prefix}-B-right",
            "every doubled generator commutes with every entry of Bbar'",
            [(f"Bbar'[{i},{j}] vs abar{k}", p) for (i, j, k), p in b_right]
            or [("all", alg.zero())],
        )
    )
    return CheckReport(model_id=model_id, conditions=conditions)


# -- physical realizability ---------------------------------------------------

def coupling_commutator_matrix(dm: DoubledModel) -> OperatorMatrix:
    """The matrix [Cbar', abar] with entry (j, k) = [Cbar_k*, abar_j]."""
    alg = dm.algebra
    entries = []
    for j in range(2 * dm.n):
        for k in range(2 * dm.m):
            entries.append(
                dm.Cbar.entry(k, 0).adjoint().commutator(dm.abar.entry(j, 0))
            )
    return OperatorMatrix(alg, 2 * dm.n, 2 * dm.m, entries)


def check_physical_realizability(
    model: QsdeModel, model_id: str = "model"
) -> CheckReport:
    """Necessary and sufficient realizability conditions, plus extraction."""
    alg = model.algebra
    dm = double(model)
    report = check_preservation(model, NoiseSpec.default(model.m), model_id, id_prefix="PR-CCR")

    b_target = coupling_commutator_matrix(dm) @ OperatorMatrix.from_scalars(alg, dm.Ibar)
    conditions = list(report.conditions)
    conditions.append(
        _matrix_residual(
            "PR-B-match",
            "Bbar equals the coupling commutator matrix [Cbar', abar] Ibar",
            dm.Bbar - b_target,
        )
    )
    conditions.append(
        _matrix_residual(
            "PR-D-identity",
            "Dbar is the identity",
            dm.Dbar - OperatorMatrix.identity(alg, 2 * model.m),
        )
    )
    report = CheckReport(model_id=model_id, conditions=conditions)

    if report.overall and not model.A.is_zero and alg.theta.invertible:
        hbar = extract_hamiltonian(model, dm=dm)
        report.derived = {
            "nbar": dm.nbar,
            "hamiltonian": hbar,
            "hamiltonian_self_adjoint": hbar.adjoint() == hbar,
            "coupling": dm.Cbar.col(0),
        }
    return report


def extract_hamiltonian(
    model: QsdeModel,
    use_printed_theta_bar: bool = False,
    dm: DoubledModel | None = None,
) -> OperatorPolynomial:
    """Hamiltonian of the realizing oscillator.

    Uses the graded commutation matrix diag(theta, -theta*) where the
    doubled-theta inverse appears; set ``use_printed_theta_bar`` to audit
    the literal diag(theta, theta*) reading instead.
    """
    if model.A.is_zero:
        raise ValueError("Hamiltonian extraction needs a nonzero drift")
    alg = model.algebra
    dm = dm or double(model)
    base = dm.theta_bar_printed if use_printed_theta_bar else dm.J
    inv = OperatorMatrix.from_scalars(alg, grid_inverse(base))
    s = (dm.abar.adjoint() @ inv @ dm.Abar - dm.Abar.adjoint() @ inv @ dm.abar).entry(0, 0)
    return s.scale(Scalar(0, Fraction(1, 2 * dm.nbar)))


def reconstruct_generator(
    hbar: OperatorPolynomial, lbar: OperatorMatrix
) -> OperatorMatrix:
    """Drift vector of the oscillator defined by (hbar, lbar).

    Entry j is (1/2) (row j of [Lbar', abar] Ibar) Lbar + i [hbar, abar_j];
    for a physically realizable model this reproduces Abar exactly.
    """
    alg = hbar.algebra
    alg.require_compatible(lbar.algebra)
    if lbar.cols != 1 or lbar.rows % 2 != 0:
        raise ValueError("coupling vector must be a column of even length")
    m = lbar.rows // 2
    n = alg.modes
    abar = OperatorMatrix.column(
        alg,
        [alg.annihilator(j) for j in range(1, n + 1)]
        + [alg.creator(j) for j in range(1, n + 1)],
    )
    comm = OperatorMatrix(
        alg,
        2 * n,
        2 * m,
        [
            lbar.entry(k, 0).adjoint().commutator(abar.entry(j, 0))
            for j in range(2 * n)
            for k in range(2 * m)
        ],
    )
    ibar = OperatorMatrix.from_scalars(alg, block_diag(identity_grid(m), grid_neg(identity_grid(m))))
    dissipative = _half(comm @ ibar @ lbar)
    hamiltonian_part = OperatorMatrix.column(
        alg,
        [hbar.commutator(abar.entry(j, 0)).scale(Scalar(0, 1)) for j in range(2 * n)],
    )
    return dissipative + hamiltonian_part


# -- lossless and storage conditions ------------------------------------------

def check_lossless(
    model: QsdeModel,
    phi: OperatorPolynomial | None = None,
    model_id: str = "model",
) -> CheckReport:
    """Differential lossless conditions for a given storage function."""
    phi = phi if phi is not None else model.phi
    if phi is None:
        raise ValueError("a storage function is required (model phi or argument)")
    alg = model.algebra
    dm = double(model)
    grad = OperatorMatrix.column(alg, wirtinger_gradient(phi))

    lhs1 = (grad.adjoint() @ dm.Abar).entry(0, 0)
    rhs1 = -(dm.Cbar.adjoint() @ dm.Cbar).entry(0, 0)
    conditions = [
        _residual_condition(
            "LL-gradient-A",
            "grad(phi)' Abar equals -Cbar' Cbar",
            [("scalar", lhs1 - rhs1)],
        )
    ]
    conditions.append(
        _matrix_residual(
            "LL-B-gradient",
            "(1/2) Bbar' grad(phi) equals -Cbar",
            _half(dm.Bbar.adjoint() @ grad) + dm.Cbar,
        )
    )
    conditions.append(
        _matrix_residual(
            "LL-D-unitary",
            "I - Dbar' Dbar vanishes",
            OperatorMatrix.identity(alg, 2 * model.m) - dm.Dbar.adjoint() @ dm.Dbar,
        )
    )
    conditions.append(
        _residual_condition(
            "LL-phi-selfadjoint",
            "the storage function is self-adjoint",
            [("phi' - phi", phi.adjoint() - phi)],
        )
    )
    nonneg, note = _phi_nonnegative(phi)
    conditions.append(
        Condition(
            condition_id="LL-phi-nonneg",
            description=f"the storage function is non-negative ({note})",
            passed=nonneg,
            residual_norm=0.0,
            witness=[] if nonneg else [{"entry": "phi", "residual": note}],
        )
    )
    return CheckReport(model_id=model_id, conditions=conditions)


def _phi_nonnegative(phi: OperatorPolynomial):
    """Structural positivity check with a numerical fallback.

    Returns (passed, note).  Structural route: phi vanishes at the vacuum
    and is a quadratic form with a positive semidefinite Hermitian
    coefficient matrix.  Otherwise, when theta is the identity, the
    truncated-representation eigenvalue check decides.
    """
    alg = phi.algebra
    if phi.is_zero:
        return True, "zero storage function"
    n = alg.modes
    const = None
    quad = [[None] * n for _ in range(n)]
    structural = True
    for mono, coeff in phi.terms.items():
        if mono.is_unit:
            const = coeff
            structural = False
            continue
        if mono.degree == 2 and sum(mono.creation) == 1 and sum(mono.annihilation) == 1:
            i = mono.creation.index(1)
            j = mono.annihilation.index(1)
            quad[i][j] = coeff
        else:
            structural = False
    if const is not None and not const.is_zero(alg.tol):
        return False, "nonzero vacuum value"
    if structural:
        import numpy as np

        p = np.array(
            [[(quad[i][j].to_complex() if quad[i][j] is not None else 0j) for j in range(n)]
             for i in range(n)]
        )
        if np.max(np.abs(p - p.conj().T)) > alg.tol:
            return False, "quadratic form is not Hermitian"
        min_eig = float(np.linalg.eigvalsh(p).min())
        if min_eig >= -alg.tol:
            return True, "positive semidefinite quadratic form"
        return False, f"quadratic form has negative eigenvalue {min_eig:.3g}"
    if alg.theta.is_identity:
        from .fock import psd_check

        degree = phi.max_degree
        truncation = max(degree + 2, 4)
        passed, min_eig = psd_check(phi, truncation, degree)
        note = f"truncated-representation minimum eigenvalue {min_eig:.3g}"
        return passed, note
    return False, "positivity not established for non-identity theta"


def check_storage_condition(
    phi: OperatorPolynomial, model_id: str = "model"
) -> CheckReport:
    """Gradient commutator condition characterizing admissible storage functions."""
    alg = phi.algebra
    n = alg.modes
    abar = OperatorMatrix.column(
        alg,
        [alg.annihilator(j) for j in range(1, n + 1)]
        + [alg.creator(j) for j in range(1, n + 1)],
    )
    grad = OperatorMatrix.column(alg, wirtinger_gradient(phi))
    actual = row_commutator(grad, abar)
    theta = alg.theta.theta
    two_theta = grid_scale(theta, Scalar(2))
    target_grid = tuple(
        tuple(
            (two_theta[i][j - n] if j >= n and i < n else
             grid_neg(grid_transpose(two_theta))[i - n][j] if i >= n and j < n else
             Scalar(0))
            for j in range(2 * n)
        )
        for i in range(2 * n)
    )
    desc = "[grad(phi), abar^T] equals the constant block matrix [[0, 2I], [-2I, 0]]"
    if not alg.theta.is_identity:
        desc = (
            "[grad(phi), abar^T] equals the theta-scaled block matrix "
            "[[0, 2*theta], [-2*theta^T, 0]] (generalized target for "
            "non-identity theta)"
        )
    cond = _matrix_residual(
        "ST-gradient-commutator",
        desc,
        actual - OperatorMatrix.from_scalars(alg, target_grid),
    )
    return CheckReport(model_id=model_id, conditions=[cond])


# -- storage-function synthesis -----------------------------------------------

def synthesize_storage(model: QsdeModel) -> OperatorPolynomial | None:
    """Search for a quadratic storage function certifying the lossless property.

    Solves the linear gradient condition for a Hermitian coefficient matrix
    and verifies the full lossless and storage-gradient conditions with the
    candidate; returns None when no quadratic witness exists.
    """
    import numpy as np

    alg = model.algebra
    n, m = model.n, model.m
    try:
        b_grid = _constant_grid(model.B)
        lam = _linear_output_matrix(model)
    except ValueError:
        return None
    b_dag = np.array([[x.to_complex() for x in row] for row in grid_adjoint(b_grid)])
    lam_c = np.array([[x.to_complex() for x in row] for row in lam])
    # gradient condition for phi = 2 sum P_ij ai' aj reduces to B' P = -Lambda
    try:
        p_mat, residuals, rank, _ = np.linalg.lstsq(b_dag, -lam_c, rcond=None)
    except np.linalg.LinAlgError:
        return None
    if np.max(np.abs(b_dag @ p_mat - (-lam_c))) > alg.tol:
        return None
    if np.max(np.abs(p_mat - p_mat.conj().T)) > alg.tol:
        return None

    exact = _exact_quadratic_solution(model, b_grid, lam) if m == n else None
    phi = alg.zero()
    for i in range(n):
        for j in range(n):
            if exact is not None:
                coeff = exact[i][j] * Scalar(2)
            else:
                coeff = Scalar(2) * Scalar.of(complex(p_mat[i, j]))
            cre = tuple(1 if t == i else 0 for t in range(n))
            ann = tuple(1 if t == j else 0 for t in range(n))
            phi = phi + alg.monomial(cre, ann, coeff)

    try:
        ok = (
            check_lossless(model, phi).overall
            and check_storage_condition(phi).overall
        )
    except ValueError:
        return None
    return phi if ok else None


def _exact_quadratic_solution(model, b_grid, lam):
    """Exact P from B' P = -Lambda when B' is square and invertible."""
    try:
        inv = grid_inverse(grid_adjoint(b_grid))
    except ValueError:
        return None
    from .scalars import grid_matmul

    return grid_matmul(inv, grid_neg(lam))


def _constant_grid(mat: OperatorMatrix):
    rows = []
    for i in range(mat.rows):
        row = []
        for j in range(mat.cols):
            e = mat.entry(i, j)
            if not e.is_constant:
                raise ValueError("non-constant entry")
            row.append(e.constant_value())
        rows.append(tuple(row))
    return tuple(rows)


def _linear_output_matrix(model: QsdeModel):
    """Coefficient matrix Lambda with C = Lambda a; requires linear C."""
    n, m = model.n, model.m
    lam = [[Scalar(0)] * n for _ in range(m)]
    for v in range(m):
        for mono, coeff in model.C.entry(v, 0).terms.items():
            if mono.degree != 1 or sum(mono.annihilation) != 1:
                raise ValueError("output map is not linear in the mode operators")
            lam[v][mono.annihilation.index(1)] = coeff
    return tuple(tuple(row) for row in lam)


# -- aggregate runner ---------------------------------------------------------

CHECK_NAMES = ("class", "preserve", "realize", "lossless", "storage")


def run_checks(
    model: QsdeModel,
    selected=CHECK_NAMES,
    noise: NoiseSpec | None = None,
    phi: OperatorPolynomial | None = None,
    model_id: str = "model",
) -> CheckReport:
    """Run the selected check families and merge their reports."""
    report = CheckReport(model_id=model_id, conditions=[])
    if "class" in selected:
        report = report.merged_with(check_class(model, model_id))
    if "preserve" in selected:
        report = report.merged_with(check_preservation(model, noise, model_id))
    if "realize" in selected:
        report = report.merged_with(check_physical_realizability(model, model_id))
    if "lossless" in selected or "storage" in selected:
        candidate = phi if phi is not None else model.phi
        synthesized = False
        if candidate is None:
            candidate = synthesize_storage(model)
            synthesized = True
        if candidate is None:
            report = report.merged_with(
                CheckReport(
                    model_id=model_id,
                    conditions=[
                        Condition(
                            condition_id="LL-phi-available",
                            description="a storage function is available "
                            "(declared, supplied or synthesized)",
                            passed=False,
                            residual_norm=0.0,
                            witness=[{"entry": "phi", "residual": "no candidate found"}],
                        )
                    ],
                )
            )
        else:
            if "lossless" in selected:
                report = report.merged_with(check_lossless(model, candidate, model_id))
            if "storage" in selected:
                report = report.merged_with(check_storage_condition(candidate, model_id))
            derived = dict(report.derived or {})
            derived["storage_function"] = candidate
            derived["storage_synthesized"] = synthesized
            report.derived = derived
    return report
