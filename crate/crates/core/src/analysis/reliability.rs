use super::AnalysisError;

/// Cronbach's alpha for a respondents x items matrix, with n-1 variances.
///
/// Variances are computed from sums of deviations from the first row, so
/// integer survey data is handled exactly and identical item columns give
/// exactly 1.
pub fn cronbach_alpha(rows: &[Vec<f64>]) -> Result<f64, AnalysisError> {
    if rows.len() < 2 {
        return Err(AnalysisError::TooFewRespondents);
    }
    let k = rows[0].len();
    if k < 2 {
        return Err(AnalysisError::TooFewItems);
    }
    if rows.iter().any(|r| r.len() != k) {
        return Err(AnalysisError::RaggedMatrix);
    }

    let n = rows.len() as f64;
    let origin = &rows[0];
    // n * SS = n * sum(d^2) - (sum d)^2, with d measured from the first row
    let scaled_ss = |values: &mut dyn Iterator<Item = f64>| {
        let (mut s, mut s2) = (0.0, 0.0);
        for d in values {
            s += d;
            s2 += d * d;
        }
        n * s2 - s * s
    };
    let item_ss: f64 = (0..k)
        .map(|j| scaled_ss(&mut rows.iter().map(|r| r[j] - origin[j])))
        .sum();
    let total_ss = scaled_ss(&mut rows.iter().map(|r| {
        r.iter().zip(origin).map(|(v, o)| v - o).sum::<f64>()
    }));
    if total_ss <= 0.0 {
        return Err(AnalysisError::DegenerateTotal);
    }
    let kf = k as f64;
    Ok(kf * (total_ss - item_ss) / ((kf - 1.0) * total_ss))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_items_give_one() {
        let rows = vec![
            vec![4.0, 4.0, 4.0],
            vec![5.0, 5.0, 5.0],
            vec![3.0, 3.0, 3.0],
            vec![5.0, 5.0, 5.0],
        ];
        assert_eq!(cronbach_alpha(&rows).unwrap(), 1.0);
    }

    #[test]
    fn hand_computed() {
        // items: [1,2,3], [1,3,2]; item vars 1,1; totals 2,5,5 var 3
        // alpha = 2 * (1 - 2/3) = 2/3
        let rows = vec![vec![1.0, 1.0], vec![2.0, 3.0], vec![3.0, 2.0]];
        assert!((cronbach_alpha(&rows).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            cronbach_alpha(&[vec![1.0, 2.0]]),
            Err(AnalysisError::TooFewRespondents)
        ));
        assert!(matches!(
            cronbach_alpha(&[vec![1.0], vec![2.0]]),
            Err(AnalysisError::TooFewItems)
        ));
        assert!(matches!(
            cronbach_alpha(&[vec![1.0, 2.0], vec![2.0]]),
            Err(AnalysisError::RaggedMatrix)
        ));
        assert!(matches!(
            cronbach_alpha(&[vec![3.0, 3.0], vec![3.0, 3.0]]),
            Err(AnalysisError::DegenerateTotal)
        ));
        // items vary but cancel in the total
        assert!(matches!(
            cronbach_alpha(&[vec![1.0, 2.0], vec![2.0, 1.0]]),
            Err(AnalysisError::DegenerateTotal)
        ));
    }
}
