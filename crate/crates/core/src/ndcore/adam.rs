use crate::error::{Error, Result};
use crate::ndcore::tensor::{Real, Tensor};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 1e-3,
            beta1: 0.93,
            beta2: 0.98,
            eps: 1e-8,
        }
    }
}

/// Adam moments for an ordered list of parameter tensors.
#[derive(Clone, Debug)]
pub struct AdamState<R> {
    pub config: AdamConfig,
    pub step: u64,
    pub m: Vec<Tensor<R>>,
    pub v: Vec<Tensor<R>>,
}

impl<R: Real> AdamState<R> {
    pub fn new<'a>(config: AdamConfig, params: impl IntoIterator<Item = &'a Tensor<R>>) -> Self {
        let m: Vec<Tensor<R>> = params.into_iter().map(|p| Tensor::zeros(p.shape())).collect();
        AdamState {
            config,
            step: 0,
            v: m.clone(),
            m,
        }
    }

    /// One bias-corrected Adam update.
    pub fn step(&mut self, params: &mut [&mut Tensor<R>], grads: &[&Tensor<R>]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::Shape(format!(
                "adam tracks {} tensors, got {} params and {} grads",
                self.m.len(),
                params.len(),
                grads.len()
            )));
        }
        for ((p, g), m) in params.iter().zip(grads).zip(&self.m) {
            if p.shape() != m.shape() || g.shape() != m.shape() {
                return Err(Error::Shape(format!(
                    "adam: param {:?}, grad {:?}, state {:?}",
                    p.shape(),
                    g.shape(),
                    m.shape()
                )));
            }
        }

        self.step += 1;
        let c = self.config;
        let t = self.step as i32;
        let b1 = R::from_f64(c.beta1);
        let b2 = R::from_f64(c.beta2);
        let one_m_b1 = R::from_f64(1.0 - c.beta1);
        let one_m_b2 = R::from_f64(1.0 - c.beta2);
        let corr1 = R::from_f64(1.0 / (1.0 - c.beta1.powi(t)));
        let corr2 = R::from_f64(1.0 / (1.0 - c.beta2.powi(t)));
        let lr = R::from_f64(c.lr);
        let eps = R::from_f64(c.eps);

        for (((p, g), m), v) in params.iter_mut().zip(grads).zip(&mut self.m).zip(&mut self.v) {
            let pd = p.data_mut();
            let gd = g.data();
            let md = m.data_mut();
            let vd = v.data_mut();
            for i in 0..pd.len() {
                let gi = gd[i];
                md[i] = b1 * md[i] + one_m_b1 * gi;
                vd[i] = b2 * vd[i] + one_m_b2 * gi * gi;
                let m_hat = md[i] * corr1;
                let v_hat = vd[i] * corr2;
                pd[i] -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> Tensor<f64> {
        Tensor::from_vec(&[1], vec![v]).unwrap()
    }

    #[test]
    fn first_step_moves_by_lr() {
        let mut p = scalar(0.0);
        let g = scalar(1.0);
        let mut adam = AdamState::new(AdamConfig::default(), [&p]);
        adam.step(&mut [&mut p], &[&g]).unwrap();
        // m_hat = v_hat = 1 => step = lr / (1 + eps)
        let expected = -1e-3 / (1.0 + 1e-8);
        assert!((p.data()[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn zero_gradient_is_noop() {
        let mut p = scalar(0.7);
        let g = scalar(0.0);
        let mut adam = AdamState::new(AdamConfig::default(), [&p]);
        for _ in 0..3 {
            adam.step(&mut [&mut p], &[&g]).unwrap();
        }
        assert_eq!(p.data()[0], 0.7);
    }

    #[test]
    fn constant_gradient_step_bounded_by_lr() {
        let mut p = scalar(0.0);
        let g = scalar(0.37);
        let mut adam = AdamState::new(AdamConfig::default(), [&p]);
        let mut prev = 0.0;
        for _ in 0..2 {
            adam.step(&mut [&mut p], &[&g]).unwrap();
            let delta = (p.data()[0] - prev).abs();
            assert!(delta <= 1e-3 * (1.0 + 1e-6), "step {delta}");
            prev = p.data()[0];
        }
        assert!(adam.v[0].data()[0] >= 0.0);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let mut p = scalar(0.0);
        let g = Tensor::<f64>::zeros(&[2]);
        let mut adam = AdamState::new(AdamConfig::default(), [&p]);
        assert!(adam.step(&mut [&mut p], &[&g]).is_err());
        assert_eq!(adam.step, 0);
    }
}
