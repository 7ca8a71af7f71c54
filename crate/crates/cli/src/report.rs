//! One-shot reports: the binomial uncertainty grid and a per-instance
//! assessment on a dataset.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use epis_core::{
    fit_model, solve_binomial_support, Assessment, Dataset, Error, LearnerConfig, LogRegParams,
    Normalizer, SupportTable, TreeParams,
};

use crate::error::{CliError, Result};

/// CSV grid of support degrees and uncertainties for all window counts
/// (pos, neg) in {0..max}^2.
pub fn support_table(max: u32) -> String {
    let mut out = String::from("pos,neg,pi1,pi0,ue,ua\n");
    for pos in 0..=max {
        for neg in 0..=max {
            let support = solve_binomial_support(pos, neg);
            let a = Assessment::from_support(support).expect("supports are in range");
            writeln!(
                out,
                "{pos},{neg},{:.6},{:.6},{:.6},{:.6}",
                a.support.pi1, a.support.pi0, a.profile.epistemic, a.profile.aleatoric
            )
            .expect("string write");
        }
    }
    out
}

/// Fits the learner on every row except `instance` and reports the support
/// degrees and uncertainty profile at that left-out row.
pub fn assess_instance(dataset: &Path, learner: &str, instance: usize) -> Result<String> {
    let data = Dataset::load_csv(dataset)?;
    if instance >= data.len() {
        return Err(CliError::Core(Error::IndexOutOfRange { index: instance, len: data.len() }));
    }
    let learner = match learner {
        "parzen" => LearnerConfig::Parzen { k: None },
        "tree" => LearnerConfig::Tree(TreeParams::default()),
        "logreg" => LearnerConfig::LogReg(LogRegParams::default()),
        other => {
            return Err(CliError::InvalidConfig(format!(
                "unknown learner {other:?}; expected parzen, tree, or logreg"
            )))
        }
    };
    let rows: Vec<usize> = (0..data.len()).filter(|&r| r != instance).collect();
    let labels: Vec<u8> = rows.iter().map(|&r| data.label(r)).collect();
    let norm = Normalizer::fit(&data, &rows)?;
    let x = norm.apply_all(&data)?;
    let k_default = ((rows.len() as f64).sqrt().round() as usize).max(1);
    let table = Arc::new(SupportTable::new());
    let model = fit_model(&learner, &x, &rows, &labels, k_default, &table)?;
    let a = model.assess(&x[instance])?;
    Ok(format!(
        "pi1 = {:.6}\npi0 = {:.6}\nue = {:.6}\nua = {:.6}\ns1 = {:.6}\ns0 = {:.6}\n",
        a.support.pi1,
        a.support.pi0,
        a.profile.epistemic,
        a.profile.aleatoric,
        a.profile.s1,
        a.profile.s0
    ))
}
