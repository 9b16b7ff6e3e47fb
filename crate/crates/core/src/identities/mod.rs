//! Catalog of fractional integration-by-parts and duality identities,
//! evaluated as discrete residuals.

mod families;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

pub use families::Family;

use crate::duality::{dual, pairing};
use crate::error::{Error, Result};
use crate::fractional::{left_frac_integral, left_rl_derivative, right_frac_integral, right_rl_derivative};
use crate::grid::{fd_derivative, make_grid, norm, FractionalOrder, GridFunction, NormKind};

/// Identity tags. `ALL` lists every variant once, in catalog order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityId {
    IbpIntClassical,
    IbpDerClassical,
    IntDualLeft,
    IntDualRight,
    IntDualLeftInv,
    IntDualRightInv,
    DerDualLeft,
    DerDualRight,
    DerDualLeftSc,
    DerDualRightExp,
    DerDualRightSc,
    DerDualLeftExp,
    IbpIntLeftOnly,
    IbpIntRightOnly,
    IbpDerLeftOnly,
    IbpDerRightOnly,
    ComplementCompose,
    FracToClassical,
    FracToClassicalDualed,
    MixedIbp,
    DualCompose,
}

/// Whether an identity compares two functions or two numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentityKind {
    Pointwise,
    Scalar,
}

/// Which form of the right-hand side to evaluate.
///
/// `Stated` is the catalog form as written in `IdentityId::statement`.
/// `Corrected` negates the right-hand side of the identities whose sign
/// depends on the reflected-derivative relation: with `D^1_{b-} = -d/dt`,
/// `D^alpha_{a+} f* = (D^alpha_{b-} f)*` holds with a plus sign, and the
/// stated minus sign propagates into every identity built on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum IdentityForm {
    #[default]
    Stated,
    Corrected,
}

impl FromStr for IdentityForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stated" => Ok(IdentityForm::Stated),
            "corrected" => Ok(IdentityForm::Corrected),
            other => Err(Error::domain(format!(
                "unknown identity form `{other}` (expected stated|corrected)"
            ))),
        }
    }
}

impl fmt::Display for IdentityForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IdentityForm::Stated => "stated",
            IdentityForm::Corrected => "corrected",
        })
    }
}

/// Fractional order(s) an identity is evaluated at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Orders {
    Single(FractionalOrder),
    Pair(FractionalOrder, FractionalOrder),
}

impl Orders {
    pub fn alpha1(&self) -> FractionalOrder {
        match *self {
            Orders::Single(a) | Orders::Pair(a, _) => a,
        }
    }

    pub fn alpha2(&self) -> Option<FractionalOrder> {
        match *self {
            Orders::Single(_) => None,
            Orders::Pair(_, b) => Some(b),
        }
    }

    /// `Single(alpha)` or the complementary pair `(alpha, 1 - alpha)`,
    /// whichever `id` takes.
    pub fn for_identity(id: IdentityId, alpha: FractionalOrder) -> Orders {
        if id.takes_pair() {
            Orders::Pair(alpha, alpha.complement())
        } else {
            Orders::Single(alpha)
        }
    }
}

impl IdentityId {
    pub const ALL: [IdentityId; 21] = [
        IdentityId::IbpIntClassical,
        IdentityId::IbpDerClassical,
        IdentityId::IntDualLeft,
        IdentityId::IntDualRight,
        IdentityId::IntDualLeftInv,
        IdentityId::IntDualRightInv,
        IdentityId::DerDualLeft,
        IdentityId::DerDualRight,
        IdentityId::DerDualLeftSc,
        IdentityId::DerDualRightExp,
        IdentityId::DerDualRightSc,
        IdentityId::DerDualLeftExp,
        IdentityId::IbpIntLeftOnly,
        IdentityId::IbpIntRightOnly,
        IdentityId::IbpDerLeftOnly,
        IdentityId::IbpDerRightOnly,
        IdentityId::ComplementCompose,
        IdentityId::FracToClassical,
        IdentityId::FracToClassicalDualed,
        IdentityId::MixedIbp,
        IdentityId::DualCompose,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            IdentityId::IbpIntClassical => "IBP_INT_CLASSICAL",
            IdentityId::IbpDerClassical => "IBP_DER_CLASSICAL",
            IdentityId::IntDualLeft => "INT_DUAL_LEFT",
            IdentityId::IntDualRight => "INT_DUAL_RIGHT",
            IdentityId::IntDualLeftInv => "INT_DUAL_LEFT_INV",
            IdentityId::IntDualRightInv => "INT_DUAL_RIGHT_INV",
            IdentityId::DerDualLeft => "DER_DUAL_LEFT",
            IdentityId::DerDualRight => "DER_DUAL_RIGHT",
            IdentityId::DerDualLeftSc => "DER_DUAL_LEFT_SC",
            IdentityId::DerDualRightExp => "DER_DUAL_RIGHT_EXP",
            IdentityId::DerDualRightSc => "DER_DUAL_RIGHT_SC",
            IdentityId::DerDualLeftExp => "DER_DUAL_LEFT_EXP",
            IdentityId::IbpIntLeftOnly => "IBP_INT_LEFT_ONLY",
            IdentityId::IbpIntRightOnly => "IBP_INT_RIGHT_ONLY",
            IdentityId::IbpDerLeftOnly => "IBP_DER_LEFT_ONLY",
            IdentityId::IbpDerRightOnly => "IBP_DER_RIGHT_ONLY",
            IdentityId::ComplementCompose => "COMPLEMENT_COMPOSE",
            IdentityId::FracToClassical => "FRAC_TO_CLASSICAL",
            IdentityId::FracToClassicalDualed => "FRAC_TO_CLASSICAL_DUALED",
            IdentityId::MixedIbp => "MIXED_IBP",
            IdentityId::DualCompose => "DUAL_COMPOSE",
        }
    }

    /// The identity as evaluated in the stated form. `Q` is the dual,
    /// `I`/`D` the Riemann-Liouville integral/derivative, `<f, g>` the
    /// integral of `f g` over `[a, b]`.
    pub fn statement(self) -> &'static str {
        match self {
            IdentityId::IbpIntClassical => "<phi, I_{a+}^a psi> = <I_{b-}^a phi, psi>",
            IdentityId::IbpDerClassical => "<phi, D_{a+}^a psi> = <D_{b-}^a phi, psi>",
            IdentityId::IntDualLeft => "I_{a+}^a Qf = Q I_{b-}^a f",
            IdentityId::IntDualRight => "I_{b-}^a Qf = Q I_{a+}^a f",
            IdentityId::IntDualLeftInv => "I_{a+}^a f = Q I_{b-}^a Qf",
            IdentityId::IntDualRightInv => "I_{b-}^a f = Q I_{a+}^a Qf",
            IdentityId::DerDualLeft => "D_{a+}^a Qf = -Q D_{b-}^a f",
            IdentityId::DerDualRight => "D_{b-}^a Qf = -Q D_{a+}^a f",
            IdentityId::DerDualLeftSc => "D_{a+}^a Qf = Q D_{b-}^a (-f)",
            IdentityId::DerDualRightExp => "D_{b-}^a f = -Q D_{a+}^a Qf",
            IdentityId::DerDualRightSc => "D_{b-}^a Qf = Q D_{a+}^a (-f)",
            IdentityId::DerDualLeftExp => "D_{a+}^a f = -Q D_{b-}^a Qf",
            IdentityId::IbpIntLeftOnly => "<f, Q I_{a+}^a g> = <I_{a+}^a f, Qg>",
            IdentityId::IbpIntRightOnly => "<f, Q I_{b-}^a g> = <I_{b-}^a f, Qg>",
            IdentityId::IbpDerLeftOnly => "<f, Q D_{a+}^a g> = -<D_{a+}^a f, Qg>",
            IdentityId::IbpDerRightOnly => "<f, Q D_{b-}^a g> = -<D_{b-}^a f, Qg>",
            IdentityId::ComplementCompose => "D_{a+}^a1 D_{a+}^a2 h = h'",
            IdentityId::FracToClassical => "<D_{a+}^a1 f, Q D_{a+}^a2 g> = -<f', Qg>",
            IdentityId::FracToClassicalDualed => "<Q D_{a+}^a1 f, D_{a+}^a2 g> = -<Q f', g>",
            IdentityId::MixedIbp => "<D_{a+}^a1 f, D_{b-}^a2 h> = <f', h>",
            IdentityId::DualCompose => "D_{a+}^a1 Q D_{b-}^a2 f = -(Qf)'",
        }
    }

    pub fn kind(self) -> IdentityKind {
        use IdentityId::*;
        match self {
            IntDualLeft | IntDualRight | IntDualLeftInv | IntDualRightInv | DerDualLeft | DerDualRight
            | DerDualLeftSc | DerDualRightExp | DerDualRightSc | DerDualLeftExp | ComplementCompose | DualCompose => {
                IdentityKind::Pointwise
            }
            IbpIntClassical
            | IbpDerClassical
            | IbpIntLeftOnly
            | IbpIntRightOnly
            | IbpDerLeftOnly
            | IbpDerRightOnly
            | FracToClassical
            | FracToClassicalDualed
            | MixedIbp => IdentityKind::Scalar,
        }
    }

    pub fn operand_count(self) -> usize {
        match self.kind() {
            IdentityKind::Scalar => 2,
            IdentityKind::Pointwise => 1,
        }
    }

    /// Identities stated for a complementary pair `alpha1 + alpha2 = 1`.
    pub fn takes_pair(self) -> bool {
        use IdentityId::*;
        matches!(
            self,
            ComplementCompose | FracToClassical | FracToClassicalDualed | MixedIbp | DualCompose
        )
    }

    /// Identities whose hypotheses ask for fractional-integral images rather
    /// than merely smooth operands.
    pub fn requires_images(self) -> bool {
        use IdentityId::*;
        matches!(self, IbpDerClassical | IbpDerLeftOnly | IbpDerRightOnly)
    }

    /// Identities whose right-hand side changes sign in the corrected form.
    pub fn sign_corrected(self) -> bool {
        use IdentityId::*;
        matches!(
            self,
            DerDualLeft
                | DerDualRight
                | DerDualLeftSc
                | DerDualRightExp
                | DerDualRightSc
                | DerDualLeftExp
                | IbpDerLeftOnly
                | IbpDerRightOnly
                | FracToClassical
                | FracToClassicalDualed
                | DualCompose
        )
    }

    /// Norm the residual is measured in. Derivative identities exclude a
    /// boundary layer of width `0.05 (b - a)` at each end, where the
    /// discrete derivatives lose accuracy on non-vanishing data.
    pub fn norm_kind(self, width: f64) -> Option<NormKind> {
        use IdentityId::*;
        match self {
            IntDualLeft | IntDualRight | IntDualLeftInv | IntDualRightInv => Some(NormKind::Sup),
            DerDualLeft | DerDualRight | DerDualLeftSc | DerDualRightExp | DerDualRightSc | DerDualLeftExp
            | ComplementCompose | DualCompose => Some(NormKind::InteriorSup(0.05 * width)),
            _ => None,
        }
    }

    /// Families exercised by the default suite; the first one is primary.
    pub fn default_families(self) -> &'static [Family] {
        const SMOOTH: &[Family] = &[Family::Power(1), Family::Power(2), Family::Power(3), Family::Bump];
        const IMAGES: &[Family] = &[Family::Image, Family::Random(1), Family::Random(2)];
        const COMPOSE: &[Family] = &[Family::Power(1), Family::Power(2), Family::Power(3)];
        if self.requires_images() {
            IMAGES
        } else if self == IdentityId::ComplementCompose {
            COMPOSE
        } else {
            SMOOTH
        }
    }

    pub(crate) fn seed_salt(self) -> u64 {
        (self as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for IdentityId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::domain(format!("unknown identity `{s}`")))
    }
}

/// One evaluated residual.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub id: IdentityId,
    pub form: IdentityForm,
    pub alpha1: f64,
    pub alpha2: Option<f64>,
    pub family: String,
    pub n: usize,
    /// `"abs"` for scalar identities, otherwise the `NormKind` label.
    pub norm_kind: String,
    /// `|LHS - RHS| / max(1, |RHS|)` in the identity's norm.
    pub residual: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// Filled in by `refinement_sweep` from this and the next finer level.
    pub observed_order: Option<f64>,
}

/// Evaluates `id` on the given operands.
///
/// Pointwise identities take `u` only, scalar identities take `(u, v)`.
/// `lhs`/`rhs` in the report hold the two sides for scalar identities and
/// their norms for pointwise ones.
pub fn evaluate_identity(
    id: IdentityId,
    u: &GridFunction,
    v: Option<&GridFunction>,
    orders: Orders,
    form: IdentityForm,
) -> Result<IdentityReport> {
    match (id.takes_pair(), orders) {
        (true, Orders::Single(_)) => {
            return Err(Error::domain(format!("{id} takes a complementary order pair")));
        }
        (false, Orders::Pair(..)) => {
            return Err(Error::domain(format!("{id} takes a single order")));
        }
        (true, Orders::Pair(a1, a2)) if !a1.is_complementary_to(a2) => {
            return Err(Error::domain(format!(
                "{id} needs alpha1 + alpha2 = 1, got {a1} + {a2}"
            )));
        }
        _ => {}
    }
    let v = match (id.operand_count(), v) {
        (1, None) => None,
        (2, Some(v)) => {
            u.same_grid(v)?;
            Some(v)
        }
        (k, _) => return Err(Error::domain(format!("{id} takes {k} operand(s)"))),
    };

    let sign = match form {
        IdentityForm::Corrected if id.sign_corrected() => -1.0,
        _ => 1.0,
    };
    let a1 = orders.alpha1();
    let a2 = orders.alpha2().unwrap_or(a1);
    let mut report = IdentityReport {
        id,
        form,
        alpha1: a1.value(),
        alpha2: orders.alpha2().map(FractionalOrder::value),
        family: "custom".to_string(),
        n: u.grid().n(),
        norm_kind: String::new(),
        residual: 0.0,
        lhs: 0.0,
        rhs: 0.0,
        observed_order: None,
    };

    match id.norm_kind(u.grid().width()) {
        Some(kind) => {
            let (lhs, rhs) = pointwise_sides(id, u, a1, a2);
            let rhs = rhs.scale(sign);
            let rhs_norm = norm(&rhs, kind)?;
            report.residual = norm(&(&lhs - &rhs), kind)? / rhs_norm.max(1.0);
            report.lhs = norm(&lhs, kind)?;
            report.rhs = rhs_norm;
            report.norm_kind = kind.to_string();
        }
        None => {
            let v = v.expect("operand count checked");
            let (lhs, rhs) = scalar_sides(id, u, v, a1, a2)?;
            let rhs = sign * rhs;
            report.residual = (lhs - rhs).abs() / rhs.abs().max(1.0);
            report.lhs = lhs;
            report.rhs = rhs;
            report.norm_kind = "abs".to_string();
        }
    }
    if !report.residual.is_finite() {
        return Err(Error::domain(format!("{id}: residual is not finite")));
    }
    Ok(report)
}

fn pointwise_sides(
    id: IdentityId,
    f: &GridFunction,
    a1: FractionalOrder,
    a2: FractionalOrder,
) -> (GridFunction, GridFunction) {
    use IdentityId::*;
    let q = dual;
    let a = a1;
    match id {
        IntDualLeft => (left_frac_integral(&q(f), a), q(&right_frac_integral(f, a))),
        IntDualRight => (right_frac_integral(&q(f), a), q(&left_frac_integral(f, a))),
        IntDualLeftInv => (left_frac_integral(f, a), q(&right_frac_integral(&q(f), a))),
        IntDualRightInv => (right_frac_integral(f, a), q(&left_frac_integral(&q(f), a))),
        DerDualLeft => (left_rl_derivative(&q(f), a), -q(&right_rl_derivative(f, a))),
        DerDualRight => (right_rl_derivative(&q(f), a), -q(&left_rl_derivative(f, a))),
        DerDualLeftSc => (left_rl_derivative(&q(f), a), q(&right_rl_derivative(&-f, a))),
        DerDualRightExp => (right_rl_derivative(f, a), -q(&left_rl_derivative(&q(f), a))),
        DerDualRightSc => (right_rl_derivative(&q(f), a), q(&left_rl_derivative(&-f, a))),
        DerDualLeftExp => (left_rl_derivative(f, a), -q(&right_rl_derivative(&q(f), a))),
        ComplementCompose => (left_rl_derivative(&left_rl_derivative(f, a2), a1), fd_derivative(f)),
        DualCompose => (
            left_rl_derivative(&q(&right_rl_derivative(f, a2)), a1),
            -fd_derivative(&q(f)),
        ),
        _ => unreachable!("{id} is scalar"),
    }
}

fn scalar_sides(
    id: IdentityId,
    f: &GridFunction,
    g: &GridFunction,
    a1: FractionalOrder,
    a2: FractionalOrder,
) -> Result<(f64, f64)> {
    use IdentityId::*;
    let q = dual;
    let a = a1;
    Ok(match id {
        IbpIntClassical => (
            pairing(f, &left_frac_integral(g, a))?,
            pairing(&right_frac_integral(f, a), g)?,
        ),
        IbpDerClassical => (
            pairing(f, &left_rl_derivative(g, a))?,
            pairing(&right_rl_derivative(f, a), g)?,
        ),
        IbpIntLeftOnly => (
            pairing(f, &q(&left_frac_integral(g, a)))?,
            pairing(&left_frac_integral(f, a), &q(g))?,
        ),
        IbpIntRightOnly => (
            pairing(f, &q(&right_frac_integral(g, a)))?,
            pairing(&right_frac_integral(f, a), &q(g))?,
        ),
        IbpDerLeftOnly => (
            pairing(f, &q(&left_rl_derivative(g, a)))?,
            -pairing(&left_rl_derivative(f, a), &q(g))?,
        ),
        IbpDerRightOnly => (
            pairing(f, &q(&right_rl_derivative(g, a)))?,
            -pairing(&right_rl_derivative(f, a), &q(g))?,
        ),
        FracToClassical => (
            pairing(&left_rl_derivative(f, a1), &q(&left_rl_derivative(g, a2)))?,
            -pairing(&fd_derivative(f), &q(g))?,
        ),
        FracToClassicalDualed => (
            pairing(&q(&left_rl_derivative(f, a1)), &left_rl_derivative(g, a2))?,
            -pairing(&q(&fd_derivative(f)), g)?,
        ),
        MixedIbp => (
            pairing(&left_rl_derivative(f, a1), &right_rl_derivative(g, a2))?,
            pairing(&fd_derivative(f), g)?,
        ),
        _ => unreachable!("{id} is pointwise"),
    })
}

/// Domain the default suite and sweeps run on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub a: f64,
    pub b: f64,
}

impl Default for Domain {
    fn default() -> Self {
        Domain { a: 0.0, b: 1.0 }
    }
}

/// Builds the operands of `family` on an `n`-interval grid and evaluates `id`.
pub fn evaluate_family(
    id: IdentityId,
    family: Family,
    orders: Orders,
    domain: Domain,
    n: usize,
    form: IdentityForm,
) -> Result<IdentityReport> {
    let grid = make_grid(domain.a, domain.b, n)?;
    let (u, v) = family.operands(id, orders, &grid)?;
    let mut report = evaluate_identity(id, &u, v.as_ref(), orders, form)?;
    report.family = family.key();
    Ok(report)
}

/// Smallest grid a refinement sweep accepts.
pub const MIN_SWEEP_N: usize = 64;

/// Evaluates `id` on each grid size and fills in the observed order
/// `log(r_i / r_{i+1}) / log(n_{i+1} / n_i)` on every level but the last.
/// The order is left empty when either residual is at round-off (`<= 1e-12`).
pub fn refinement_sweep(
    id: IdentityId,
    family: Family,
    orders: Orders,
    domain: Domain,
    n_list: &[usize],
    form: IdentityForm,
) -> Result<Vec<IdentityReport>> {
    if n_list.is_empty() {
        return Err(Error::domain("refinement sweep needs at least one grid size"));
    }
    if let Some(&n) = n_list.iter().find(|&&n| n < MIN_SWEEP_N) {
        return Err(Error::domain(format!(
            "refinement sweep grid size {n} is below {MIN_SWEEP_N}"
        )));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("refinement sweep grid sizes must be strictly ascending"));
    }
    let mut reports = n_list
        .par_iter()
        .map(|&n| evaluate_family(id, family, orders, domain, n, form))
        .collect::<Result<Vec<_>>>()?;
    for i in 0..reports.len().saturating_sub(1) {
        let (r0, r1) = (reports[i].residual, reports[i + 1].residual);
        if r0 > 1e-12 && r1 > 1e-12 {
            let ratio = reports[i + 1].n as f64 / reports[i].n as f64;
            reports[i].observed_order = Some((r0 / r1).ln() / ratio.ln());
        }
    }
    Ok(reports)
}

/// Acceptance threshold for an identity's residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub max_residual: f64,
    /// Grid size the threshold applies at.
    pub at_n: usize,
    /// Minimum observed order over the sweep, if one is required.
    pub min_order: Option<f64>,
}

pub fn tolerance(id: IdentityId) -> Tolerance {
    use IdentityId::*;
    let t = |max_residual, at_n, min_order| Tolerance {
        max_residual,
        at_n,
        min_order,
    };
    match id {
        IntDualLeft | IntDualRight | IntDualLeftInv | IntDualRightInv => t(1e-6, 2048, None),
        DerDualLeft | DerDualRight | DerDualLeftSc | DerDualRightExp | DerDualRightSc | DerDualLeftExp => {
            t(1e-2, 2048, None)
        }
        IbpIntClassical | IbpDerClassical | IbpIntLeftOnly | IbpIntRightOnly | IbpDerLeftOnly | IbpDerRightOnly => {
            t(1e-4, 4096, Some(1.0))
        }
        ComplementCompose => t(1e-2, 4096, None),
        FracToClassical | FracToClassicalDualed | MixedIbp => t(1e-3, 4096, Some(0.5)),
        DualCompose => t(1e-2, 4096, Some(0.5)),
    }
}

/// Acceptance group an identity belongs to.
pub fn criterion(id: IdentityId) -> &'static str {
    use IdentityId::*;
    match id {
        IntDualLeft | IntDualRight | IntDualLeftInv | IntDualRightInv | DerDualLeft | DerDualRight | DerDualLeftSc
        | DerDualRightExp | DerDualRightSc | DerDualLeftExp => "duality",
        IbpIntClassical | IbpDerClassical | IbpIntLeftOnly | IbpIntRightOnly | IbpDerLeftOnly | IbpDerRightOnly => {
            "integration_by_parts"
        }
        ComplementCompose => "complementary_composition",
        FracToClassical | FracToClassicalDualed | MixedIbp | DualCompose => "fractional_to_classical",
    }
}

/// Residuals below this count as exact; no order is asked of them.
pub const ROUND_OFF: f64 = 1e-10;

/// Outcome of checking one sweep against [`tolerance`].
#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    /// The sweep contains the grid size the threshold applies at.
    pub evaluated: bool,
    pub residual_ok: bool,
    /// Residuals nonincreasing up to a factor 1.5, or all at round-off.
    pub monotone: bool,
    /// Smallest observed order, or `None` if every residual is at round-off.
    pub min_order: Option<f64>,
    pub order_ok: bool,
}

impl Assessment {
    pub fn pass(&self) -> bool {
        self.evaluated && self.residual_ok && self.monotone && self.order_ok
    }
}

/// Checks a refinement sweep of a single identity against its tolerance.
pub fn assess(reports: &[IdentityReport]) -> Assessment {
    let Some(first) = reports.first() else {
        return Assessment {
            evaluated: false,
            residual_ok: false,
            monotone: false,
            min_order: None,
            order_ok: false,
        };
    };
    let tol = tolerance(first.id);
    let at = reports.iter().find(|r| r.n == tol.at_n);
    let all_exact = reports.iter().all(|r| r.residual < ROUND_OFF);
    let monotone = all_exact || reports.windows(2).all(|w| w[1].residual <= 1.5 * w[0].residual);
    let min_order = reports
        .iter()
        .filter_map(|r| r.observed_order)
        .fold(None, |m: Option<f64>, o| Some(m.map_or(o, |m| m.min(o))));
    let order_ok = match (tol.min_order, min_order) {
        (None, _) => true,
        (Some(_), _) if all_exact => true,
        (Some(want), Some(got)) => got >= want,
        (Some(_), None) => false,
    };
    Assessment {
        evaluated: at.is_some(),
        residual_ok: at.is_some_and(|r| r.residual <= tol.max_residual),
        monotone,
        min_order,
        order_ok,
    }
}

/// Single orders of the default suite; pairs use `(alpha, 1 - alpha)`.
pub const DEFAULT_ALPHAS: [f64; 3] = [0.25, 0.5, 0.75];

/// One `(identity, family, orders)` combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteCase {
    pub id: IdentityId,
    pub family: Family,
    pub orders: Orders,
}

/// Every identity at every default order, with all default families or
/// only the primary one.
pub fn default_suite(primary_only: bool) -> Vec<SuiteCase> {
    let mut cases = Vec::new();
    for id in IdentityId::ALL {
        let families = id.default_families();
        let families = if primary_only { &families[..1] } else { families };
        for &alpha in &DEFAULT_ALPHAS {
            let orders = Orders::for_identity(id, FractionalOrder::new(alpha).expect("default order in range"));
            for &family in families {
                cases.push(SuiteCase { id, family, orders });
            }
        }
    }
    cases
}

/// Runs `refinement_sweep` on every case in parallel; output order follows `cases`.
pub fn run_suite(
    cases: &[SuiteCase],
    domain: Domain,
    n_list: &[usize],
    form: IdentityForm,
) -> Result<Vec<Vec<IdentityReport>>> {
    cases
        .par_iter()
        .map(|c| refinement_sweep(c.id, c.family, c.orders, domain, n_list, form))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::sample;

    fn order(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn all_is_exhaustive_and_tags_unique() {
        let mut tags: Vec<_> = IdentityId::ALL.iter().map(|id| id.tag()).collect();
        tags.sort_unstable();
        tags.dedup();
        assert_eq!(tags.len(), 21);
        for id in IdentityId::ALL {
            assert_eq!(id.tag().parse::<IdentityId>().unwrap(), id);
            assert!(!id.default_families().is_empty());
            assert_eq!(id.norm_kind(1.0).is_some(), id.kind() == IdentityKind::Pointwise);
        }
    }

    #[test]
    fn order_and_operand_mismatches_are_rejected() {
        let g = make_grid(0.0, 1.0, 64).unwrap();
        let u = sample(|t| t, &g).unwrap();
        let single = Orders::Single(order(0.5));
        let pair = Orders::Pair(order(0.3), order(0.7));
        let bad_pair = Orders::Pair(order(0.3), order(0.6));
        let f = IdentityForm::Stated;
        assert!(evaluate_identity(IdentityId::IntDualLeft, &u, None, pair, f).is_err());
        assert!(evaluate_identity(IdentityId::ComplementCompose, &u, None, single, f).is_err());
        assert!(evaluate_identity(IdentityId::ComplementCompose, &u, None, bad_pair, f).is_err());
        assert!(evaluate_identity(IdentityId::IntDualLeft, &u, Some(&u), single, f).is_err());
        assert!(evaluate_identity(IdentityId::IbpIntClassical, &u, None, single, f).is_err());
        let other = GridFunction::zeros(make_grid(0.0, 2.0, 64).unwrap());
        assert!(matches!(
            evaluate_identity(IdentityId::IbpIntClassical, &u, Some(&other), single, f),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn integral_duality_is_tight() {
        for id in [
            IdentityId::IntDualLeft,
            IdentityId::IntDualRight,
            IdentityId::IntDualLeftInv,
            IdentityId::IntDualRightInv,
        ] {
            let r = evaluate_family(
                id,
                Family::Power(2),
                Orders::Single(order(0.3)),
                Domain::default(),
                256,
                IdentityForm::Stated,
            )
            .unwrap();
            assert!(r.residual < 1e-12, "{id}: {}", r.residual);
        }
    }

    #[test]
    fn corrected_form_only_flips_listed_identities() {
        let g = make_grid(0.0, 1.0, 128).unwrap();
        let orders = Orders::Single(order(0.5));
        let u = sample(|t| 1.0 + t * t, &g).unwrap();
        for id in [IdentityId::IntDualLeft, IdentityId::IntDualRight] {
            let s = evaluate_identity(id, &u, None, orders, IdentityForm::Stated).unwrap();
            let c = evaluate_identity(id, &u, None, orders, IdentityForm::Corrected).unwrap();
            assert_eq!(s.residual, c.residual);
        }
        let s = evaluate_identity(IdentityId::DerDualLeft, &u, None, orders, IdentityForm::Stated).unwrap();
        let c = evaluate_identity(IdentityId::DerDualLeft, &u, None, orders, IdentityForm::Corrected).unwrap();
        assert!(c.residual < 1e-2, "{}", c.residual);
        assert!(s.residual > 0.5, "{}", s.residual);
    }

    #[test]
    fn sweep_validates_grid_list() {
        let run = |ns: &[usize]| {
            refinement_sweep(
                IdentityId::IntDualLeft,
                Family::Power(1),
                Orders::Single(order(0.5)),
                Domain::default(),
                ns,
                IdentityForm::Stated,
            )
        };
        assert!(run(&[]).is_err());
        assert!(run(&[32, 64]).is_err());
        assert!(run(&[128, 64]).is_err());
        let reports = run(&[64, 128]).unwrap();
        assert_eq!(reports.len(), 2);
        assert!(reports[1].observed_order.is_none());
    }

    #[test]
    fn suite_is_deterministic_and_ordered() {
        let cases = default_suite(true);
        assert_eq!(cases.len(), 21 * DEFAULT_ALPHAS.len());
        let a = run_suite(&cases[..6], Domain::default(), &[64, 128], IdentityForm::Stated).unwrap();
        let b = run_suite(&cases[..6], Domain::default(), &[64, 128], IdentityForm::Stated).unwrap();
        assert_eq!(a, b);
        for (case, reports) in cases.iter().zip(&a) {
            assert_eq!(reports[0].id, case.id);
        }
    }
}
