//! Central-difference gradient verification for small models.

use crate::error::Result;
use crate::nncore::array::NumArray;
use crate::nncore::params::ParamSet;

/// Compares analytic gradients against central finite differences.
///
/// `loss_and_grads` evaluates the model's loss on a fixed batch and returns
/// the analytic gradient per parameter (aligned with the set). Every scalar
/// parameter is perturbed by +/- epsilon; the result is the maximum over all
/// of `|analytic - cd| / max(|analytic|, |cd|, 1e-12)`. Intended for models
/// up to ~1e3 parameters.
pub fn gradient_check<F>(params: &ParamSet, mut loss_and_grads: F, epsilon: f64) -> Result<f64>
where
    F: FnMut(&ParamSet) -> Result<(f64, Vec<NumArray>)>,
{
    let (_, analytic) = loss_and_grads(params)?;
    let mut worst: f64 = 0.0;
    let mut work = params.clone();
    for (pi, id) in params.ids().enumerate() {
        for i in 0..params.value(id).len() {
            let original = params.value(id).data()[i];
            work.value_mut(id).data_mut()[i] = original + epsilon;
            let (loss_plus, _) = loss_and_grads(&work)?;
            work.value_mut(id).data_mut()[i] = original - epsilon;
            let (loss_minus, _) = loss_and_grads(&work)?;
            work.value_mut(id).data_mut()[i] = original;

            let cd = (loss_plus - loss_minus) / (2.0 * epsilon);
            let a = analytic[pi].data()[i];
            let denom = a.abs().max(cd.abs()).max(1e-12);
            worst = worst.max((a - cd).abs() / denom);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nncore::tape::Tape;

    #[test]
    fn zero_parameter_model_reports_zero() {
        let params = ParamSet::new();
        let worst = gradient_check(&params, |_| Ok((0.0, vec![])), 1e-5).unwrap();
        assert_eq!(worst, 0.0);
    }

    #[test]
    fn linear_model_agrees_to_machine_precision() {
        let mut params = ParamSet::new();
        params.add("w", NumArray::from_vec(vec![0.7, -0.3], &[1, 2]).unwrap());
        let x = NumArray::vector(vec![2.0, 5.0]);
        let target = NumArray::vector(vec![1.0]);
        let worst = gradient_check(
            &params,
            |p| {
                let mut tape = Tape::new();
                let w = tape.leaf(p.value(p.ids().next().unwrap()).clone());
                let xn = tape.leaf(x.clone());
                let t = tape.leaf(target.clone());
                let y = tape.matmul(w, xn)?;
                let loss = tape.mse(y, t)?;
                let grads = tape.backward(loss)?;
                Ok((tape.value(loss).first(), vec![grads[w.0].clone()]))
            },
            1e-5,
        )
        .unwrap();
        assert!(worst < 1e-8, "worst relative error {worst}");
    }
}
