//! Central finite differences, used to check analytic gradients.

/// Relative error with a floor on the denominator so that two near-zero
/// gradients do not blow up the ratio.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    let denom = analytic.abs().max(numeric.abs()).max(1e-8);
    (analytic - numeric).abs() / denom
}

/// Step used for a coordinate of magnitude `x`.
pub fn step_for(x: f64) -> f64 {
    1e-5 * x.abs().max(1.0)
}

/// Central difference of `f` w.r.t. coordinate `i` of `x`. `x` is restored afterwards.
pub fn central_difference(f: &mut impl FnMut(&[f64]) -> f64, x: &mut [f64], i: usize) -> f64 {
    let orig = x[i];
    let h = step_for(orig);
    x[i] = orig + h;
    let plus = f(x);
    x[i] = orig - h;
    let minus = f(x);
    x[i] = orig;
    (plus - minus) / (2.0 * h)
}

/// Largest relative error between `analytic` and central differences over `indices`.
pub fn max_relative_error(
    mut f: impl FnMut(&[f64]) -> f64,
    x: &[f64],
    analytic: &[f64],
    indices: impl IntoIterator<Item = usize>,
) -> f64 {
    let mut x = x.to_vec();
    indices
        .into_iter()
        .map(|i| relative_error(analytic[i], central_difference(&mut f, &mut x, i)))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic() {
        let x = [3.0, -2.0];
        let analytic = [6.0, -4.0];
        let err = max_relative_error(|v| v[0] * v[0] + v[1] * v[1], &x, &analytic, 0..2);
        assert!(err < 1e-8);
    }
}
