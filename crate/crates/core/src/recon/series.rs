use std::fmt::Write;

use super::operator::Reconstructor;
use crate::error::Result;
use crate::grid_field::{l2_norm_on, ScalarField};
use crate::wave::BoundaryTrace;

/// Consecutive growing updates that trigger the non-contraction warning.
const GROWTH_RUN: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct TermRecord {
    pub index: usize,
    /// `‖f^(k) - f^(k-1)‖_{H_D(K)}`; for term 0 the norm of `f^(0)` itself.
    pub update_norm: f64,
    /// Relative H_D(K) error against the truth.
    pub err_hd: Option<f64>,
    /// Relative L²(K) error against the truth.
    pub err_l2: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReconReport {
    pub terms: Vec<TermRecord>,
    /// Ratio of the last two update norms, a proxy for the contraction factor.
    pub mu_hat: Option<f64>,
    pub converged: bool,
    pub warning: Option<String>,
}

impl ReconReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("term,update_norm,err_HD,err_L2\n");
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.12e}"));
        for t in &self.terms {
            let _ = writeln!(s, "{},{:.12e},{},{}", t.index, t.update_norm, opt(t.err_hd), opt(t.err_l2));
        }
        s
    }

    pub fn errors_hd(&self) -> Vec<f64> {
        self.terms.iter().filter_map(|t| t.err_hd).collect()
    }

    pub fn errors_l2(&self) -> Vec<f64> {
        self.terms.iter().filter_map(|t| t.err_l2).collect()
    }
}

impl Reconstructor {
    fn errors(&self, f: &ScalarField, truth: Option<&ScalarField>) -> Result<(Option<f64>, Option<f64>)> {
        let Some(t) = truth else { return Ok((None, None)) };
        let d = f.sub(t)?;
        let k = &self.config().kset;
        let rel = |a: f64, b: f64| if b > 0.0 { a / b } else { a };
        Ok((
            Some(rel(self.hd_norm_k(&d)?, self.hd_norm_k(t)?)),
            Some(rel(l2_norm_on(&d, k)?, l2_norm_on(t, k)?)),
        ))
    }

    /// Partial sums of `Σ K^m Π_K A₁ h` in residual form:
    /// `f^(k+1) = f^(k) + Π_K A₁ (h − Λ₁ f^(k))`.
    ///
    /// `on_term` sees every iterate, e.g. for per-term snapshots.
    pub fn neumann_series_with(
        &self,
        h: &BoundaryTrace,
        truth: Option<&ScalarField>,
        mut on_term: impl FnMut(usize, &ScalarField) -> Result<()>,
    ) -> Result<(ScalarField, ReconReport)> {
        let cfg = self.config();
        let mut report = ReconReport::default();
        let mut f = self.pseudo_inverse_step(h)?;
        let base = self.hd_norm_k(&f)?;
        let (err_hd, err_l2) = self.errors(&f, truth)?;
        report.terms.push(TermRecord {
            index: 0,
            update_norm: base,
            err_hd,
            err_l2,
        });
        on_term(0, &f)?;
        if base == 0.0 {
            report.converged = true;
            return Ok((f, report));
        }
        let mut growth = 0;
        for k in 1..cfg.m_max {
            let residual = h.sub(&self.measure(&f)?)?;
            let update = self.pseudo_inverse_step(&residual)?;
            f = f.add(&update)?;
            let un = self.hd_norm_k(&update)?;
            let (err_hd, err_l2) = self.errors(&f, truth)?;
            let prev = report.terms.last().map(|t| t.update_norm).unwrap_or(0.0);
            report.terms.push(TermRecord {
                index: k,
                update_norm: un,
                err_hd,
                err_l2,
            });
            on_term(k, &f)?;
            if prev > 0.0 {
                report.mu_hat = Some(un / prev);
            }
            growth = if un > prev { growth + 1 } else { 0 };
            if growth >= GROWTH_RUN && report.warning.is_none() {
                report.warning = Some(format!(
                    "update norm grew for {GROWTH_RUN} consecutive terms (term {k}); the series may not contract"
                ));
            }
            let fnorm = self.hd_norm_k(&f)?;
            if un == 0.0 || (fnorm > 0.0 && un / fnorm < cfg.tol_rel) {
                report.converged = true;
                break;
            }
        }
        Ok((f, report))
    }

    pub fn neumann_series(
        &self,
        h: &BoundaryTrace,
        truth: Option<&ScalarField>,
    ) -> Result<(ScalarField, ReconReport)> {
        self.neumann_series_with(h, truth, |_, _| Ok(()))
    }
}
