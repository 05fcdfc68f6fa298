use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_EFFECT_THRESHOLD: f64 = 0.4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectSize {
    pub feature: String,
    pub cohen_d: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EffectSizes {
    /// Features with |d| above the threshold, largest |d| first.
    pub significant: Vec<EffectSize>,
    /// Features with zero pooled standard deviation.
    pub degenerate: Vec<String>,
}

/// Cohen's d = (mean_P - mean_N) / pooled SD per feature.
pub fn cohen_d(positives: &[f64], negatives: &[f64]) -> Option<f64> {
    let stats = |x: &[f64]| {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        (n, m, x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0))
    };
    let (n1, m1, v1) = stats(positives);
    let (n2, m2, v2) = stats(negatives);
    let pooled = (((n1 - 1.0) * v1 + (n2 - 1.0) * v2) / (n1 + n2 - 2.0)).sqrt();
    (pooled > 0.0 && pooled.is_finite()).then(|| (m1 - m2) / pooled)
}

pub fn effect_sizes(names: &[String], positives: &[&[f64]], negatives: &[&[f64]], threshold: f64) -> Result<EffectSizes> {
    if positives.len() < 2 || negatives.len() < 2 {
        return Err(Error::Invalid("effect sizes need at least two samples per class".into()));
    }
    if positives.iter().chain(negatives).any(|r| r.len() != names.len()) {
        return Err(Error::Invalid("feature rows do not match the feature names".into()));
    }
    let mut out = EffectSizes::default();
    for (j, name) in names.iter().enumerate() {
        let p: Vec<f64> = positives.iter().map(|r| r[j]).collect();
        let n: Vec<f64> = negatives.iter().map(|r| r[j]).collect();
        match cohen_d(&p, &n) {
            None => out.degenerate.push(name.clone()),
            Some(d) if d.abs() > threshold => out.significant.push(EffectSize { feature: name.clone(), cohen_d: d }),
            Some(_) => {}
        }
    }
    out.significant
        .sort_by(|a, b| b.cohen_d.abs().total_cmp(&a.cohen_d.abs()).then_with(|| a.feature.cmp(&b.feature)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_example() {
        assert_eq!(cohen_d(&[2.0, 4.0], &[0.0, 0.0]), Some(3.0));
        assert_eq!(cohen_d(&[1.0, 1.0], &[1.0, 1.0]), None);
    }

    #[test]
    fn filters_and_flags() {
        let names = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let p = [[2.0, 1.0, 5.0], [4.0, 2.0, 5.0]];
        let n = [[0.0, 1.0, 5.0], [0.0, 2.0, 5.0]];
        let pr: Vec<&[f64]> = p.iter().map(|r| r.as_slice()).collect();
        let nr: Vec<&[f64]> = n.iter().map(|r| r.as_slice()).collect();
        let e = effect_sizes(&names, &pr, &nr, 0.4).unwrap();
        assert_eq!(e.significant, vec![EffectSize { feature: "a".into(), cohen_d: 3.0 }]);
        assert_eq!(e.degenerate, vec!["c"]);
        let swapped = effect_sizes(&names, &nr, &pr, 0.4).unwrap();
        assert_eq!(swapped.significant[0].cohen_d, -3.0);
    }
}
