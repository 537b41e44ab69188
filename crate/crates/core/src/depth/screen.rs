use crate::poset::{Edge, Poset};
use crate::ufg::{is_ufg_pair, PosetSample};

/// Outcome of the forced-zero screens.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroScreen {
    /// `p` has this edge but no observation does.
    MissingPair(Edge),
    /// Every observation has this edge but `p` does not.
    UniversalPair(Edge),
    NotScreened,
}

impl ZeroScreen {
    pub fn is_screened(&self) -> bool {
        !matches!(self, ZeroScreen::NotScreened)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ZeroScreen::MissingPair(_) => "zero-missing-pair",
            ZeroScreen::UniversalPair(_) => "zero-universal-pair",
            ZeroScreen::NotScreened => "not-screened",
        }
    }
}

/// Cheap certificate that `D_n(p) = 0`, checked before any family scan.
///
/// Either test excludes `p` from every `γ(S)` with `S` observed: a missing
/// pair leaves `p ⊄ ⋃S`, a universal pair leaves `⋂S ⊄ p`.
pub fn zero_depth_screen(p: &Poset, sample: &PosetSample) -> ZeroScreen {
    let p_rel = p.relation().without_diagonal();
    if let Some(e) = p_rel.difference(&sample.observed_pairs()).pairs().next() {
        return ZeroScreen::MissingPair(e);
    }
    let universal = sample.universal_pairs().without_diagonal();
    match universal.difference(p.relation()).pairs().next() {
        Some(e) => ZeroScreen::UniversalPair(e),
        None => ZeroScreen::NotScreened,
    }
}

/// True iff the depth vanishes everywhere: a single distinct poset, or two
/// that differ by exactly one pair.
pub fn triviality_check(sample: &PosetSample) -> bool {
    match sample.unique() {
        [_] => true,
        [a, b] => !is_ufg_pair(a, b),
        _ => false,
    }
}
