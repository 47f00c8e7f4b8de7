//! Recurrent cell updates expressed as tape operations, plus weight
//! initialization.
//!
//! Vanilla: `h' = tanh(W x + U h + b)`.
//! LSTM: 4 gates (input, forget, candidate, output) with a cell state.
//! GRU: 3 gates (update, reset, candidate).

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::nncore::array::NumArray;
use crate::nncore::params::{ParamId, ParamSet};
use crate::nncore::tape::{NodeId, Tape};

/// Glorot-uniform matrix: entries uniform in +/- sqrt(6 / (fan_in + fan_out)).
pub fn glorot_uniform(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> NumArray {
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    let data: Vec<f64> = (0..rows * cols).map(|_| rng.gen_range(-limit..limit)).collect();
    NumArray::from_vec(data, &[rows, cols]).expect("shape matches data")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    Vanilla,
    Lstm,
    Gru,
}

impl CellKind {
    pub fn gate_count(self) -> usize {
        match self {
            CellKind::Vanilla => 1,
            CellKind::Lstm => 4,
            CellKind::Gru => 3,
        }
    }

    fn gate_names(self) -> &'static [&'static str] {
        match self {
            CellKind::Vanilla => &["h"],
            CellKind::Lstm => &["i", "f", "g", "o"],
            CellKind::Gru => &["z", "r", "n"],
        }
    }
}

/// Parameter ids of one cell's weights inside a [`ParamSet`]: per gate an
/// input matrix `w`, a recurrent matrix `u`, and a bias `b`.
#[derive(Debug, Clone)]
pub struct CellWeights {
    pub kind: CellKind,
    pub input: usize,
    pub hidden: usize,
    pub w: Vec<ParamId>,
    pub u: Vec<ParamId>,
    pub b: Vec<ParamId>,
}

impl CellWeights {
    /// Registers freshly initialized weights under `prefix` in the set:
    /// Glorot-uniform matrices, zero biases, LSTM forget-gate bias +1.
    pub fn init(
        params: &mut ParamSet,
        prefix: &str,
        kind: CellKind,
        input: usize,
        hidden: usize,
        rng: &mut ChaCha8Rng,
    ) -> Self {
        let mut w = Vec::new();
        let mut u = Vec::new();
        let mut b = Vec::new();
        for gate in kind.gate_names() {
            w.push(params.add(format!("{prefix}.w_{gate}"), glorot_uniform(rng, hidden, input)));
            u.push(params.add(format!("{prefix}.u_{gate}"), glorot_uniform(rng, hidden, hidden)));
            let bias = if kind == CellKind::Lstm && *gate == "f" {
                NumArray::vector(vec![1.0; hidden])
            } else {
                NumArray::zeros(&[hidden])
            };
            b.push(params.add(format!("{prefix}.b_{gate}"), bias));
        }
        Self {
            kind,
            input,
            hidden,
            w,
            u,
            b,
        }
    }

    /// Rebuilds the id layout assuming the same registration order as
    /// [`CellWeights::init`] starting at `first` in the set.
    pub fn relocate(&self, first: usize) -> Self {
        let gates = self.kind.gate_count();
        let mut clone = self.clone();
        for g in 0..gates {
            clone.w[g] = ParamId(first + 3 * g);
            clone.u[g] = ParamId(first + 3 * g + 1);
            clone.b[g] = ParamId(first + 3 * g + 2);
        }
        clone
    }

    pub fn param_names(kind: CellKind, prefix: &str) -> Vec<String> {
        let mut names = Vec::new();
        for gate in kind.gate_names() {
            names.push(format!("{prefix}.w_{gate}"));
            names.push(format!("{prefix}.u_{gate}"));
            names.push(format!("{prefix}.b_{gate}"));
        }
        names
    }
}

/// Leaf node ids of one cell's weights on the current tape, in the same gate
/// order as [`CellWeights`].
#[derive(Debug, Clone)]
pub struct CellNodes {
    pub kind: CellKind,
    pub w: Vec<NodeId>,
    pub u: Vec<NodeId>,
    pub b: Vec<NodeId>,
}

impl CellNodes {
    pub fn insert(tape: &mut Tape, params: &ParamSet, weights: &CellWeights) -> Self {
        let leaf = |tape: &mut Tape, id: ParamId| tape.leaf(params.value(id).clone());
        Self {
            kind: weights.kind,
            w: weights.w.iter().map(|id| leaf(tape, *id)).collect(),
            u: weights.u.iter().map(|id| leaf(tape, *id)).collect(),
            b: weights.b.iter().map(|id| leaf(tape, *id)).collect(),
        }
    }
}

fn gate_preact(tape: &mut Tape, x: NodeId, h: NodeId, w: NodeId, u: NodeId, b: NodeId) -> Result<NodeId> {
    let wx = tape.matmul(w, x)?;
    let uh = tape.matmul(u, h)?;
    let s = tape.add(wx, uh)?;
    tape.add(s, b)
}

/// `h' = tanh(W x + U h + b)`.
pub fn rnn_cell(tape: &mut Tape, x: NodeId, h: NodeId, cell: &CellNodes) -> Result<NodeId> {
    let pre = gate_preact(tape, x, h, cell.w[0], cell.u[0], cell.b[0])?;
    Ok(tape.tanh(pre))
}

/// Standard 4-gate LSTM update; returns `(h', c')`.
pub fn lstm_cell(
    tape: &mut Tape,
    x: NodeId,
    h: NodeId,
    c: NodeId,
    cell: &CellNodes,
) -> Result<(NodeId, NodeId)> {
    let pre_i = gate_preact(tape, x, h, cell.w[0], cell.u[0], cell.b[0])?;
    let i = tape.sigmoid(pre_i);
    let pre_f = gate_preact(tape, x, h, cell.w[1], cell.u[1], cell.b[1])?;
    let f = tape.sigmoid(pre_f);
    let pre_g = gate_preact(tape, x, h, cell.w[2], cell.u[2], cell.b[2])?;
    let g = tape.tanh(pre_g);
    let pre_o = gate_preact(tape, x, h, cell.w[3], cell.u[3], cell.b[3])?;
    let o = tape.sigmoid(pre_o);

    let fc = tape.mul(f, c)?;
    let ig = tape.mul(i, g)?;
    let c_next = tape.add(fc, ig)?;
    let tc = tape.tanh(c_next);
    let h_next = tape.mul(o, tc)?;
    Ok((h_next, c_next))
}

/// Standard 3-gate GRU update:
/// `z = sigma(Wz x + Uz h + bz)`, `r = sigma(Wr x + Ur h + br)`,
/// `n = tanh(Wn x + Un (r*h) + bn)`, `h' = (1 - z)*n + z*h`.
pub fn gru_cell(tape: &mut Tape, x: NodeId, h: NodeId, cell: &CellNodes) -> Result<NodeId> {
    let pre_z = gate_preact(tape, x, h, cell.w[0], cell.u[0], cell.b[0])?;
    let z = tape.sigmoid(pre_z);
    let pre_r = gate_preact(tape, x, h, cell.w[1], cell.u[1], cell.b[1])?;
    let r = tape.sigmoid(pre_r);

    let rh = tape.mul(r, h)?;
    let pre_n = gate_preact(tape, x, rh, cell.w[2], cell.u[2], cell.b[2])?;
    let n = tape.tanh(pre_n);

    let one_minus_z = tape.affine(z, -1.0, 1.0);
    let zn = tape.mul(one_minus_z, n)?;
    let zh = tape.mul(z, h)?;
    tape.add(zn, zh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn zeroed_cell(tape: &mut Tape, kind: CellKind, input: usize, hidden: usize) -> CellNodes {
        let gates = kind.gate_count();
        let w = (0..gates).map(|_| tape.leaf(NumArray::zeros(&[hidden, input]))).collect();
        let u = (0..gates).map(|_| tape.leaf(NumArray::zeros(&[hidden, hidden]))).collect();
        let b = (0..gates).map(|_| tape.leaf(NumArray::zeros(&[hidden]))).collect();
        CellNodes { kind, w, u, b }
    }

    #[test]
    fn vanilla_zero_weights_give_zero_state() {
        let mut tape = Tape::new();
        let cell = zeroed_cell(&mut tape, CellKind::Vanilla, 3, 4);
        let x = tape.leaf(NumArray::vector(vec![5.0, -2.0, 1.0]));
        let h = tape.leaf(NumArray::vector(vec![0.3, 0.3, 0.3, 0.3]));
        let h2 = rnn_cell(&mut tape, x, h, &cell).unwrap();
        assert_eq!(tape.value(h2).data(), &[0.0; 4]);
    }

    #[test]
    fn lstm_zero_preactivations_halve_cell_state() {
        // gates sigmoid(0) = 0.5, candidate tanh(0) = 0 => c' = 0.5 c
        let mut tape = Tape::new();
        let cell = zeroed_cell(&mut tape, CellKind::Lstm, 2, 3);
        let x = tape.leaf(NumArray::vector(vec![0.0, 0.0]));
        let h = tape.leaf(NumArray::vector(vec![0.0; 3]));
        let c = tape.leaf(NumArray::vector(vec![0.8, -0.4, 0.2]));
        let (h2, c2) = lstm_cell(&mut tape, x, h, c, &cell).unwrap();
        let c2v = tape.value(c2).data();
        assert!((c2v[0] - 0.4).abs() < 1e-15);
        assert!((c2v[1] + 0.2).abs() < 1e-15);
        assert!((c2v[2] - 0.1).abs() < 1e-15);
        // h' = 0.5 * tanh(c')
        let h2v = tape.value(h2).data();
        assert!((h2v[0] - 0.5 * 0.4f64.tanh()).abs() < 1e-15);
    }

    #[test]
    fn gru_update_gate_forced_open_carries_state_through() {
        let mut tape = Tape::new();
        let hidden = 3;
        let mut cell = zeroed_cell(&mut tape, CellKind::Gru, 2, hidden);
        // huge update-gate bias forces z ~ 1
        cell.b[0] = tape.leaf(NumArray::vector(vec![50.0; hidden]));
        let x = tape.leaf(NumArray::vector(vec![1.0, -1.0]));
        let h = tape.leaf(NumArray::vector(vec![0.7, -0.3, 0.1]));
        let h2 = gru_cell(&mut tape, x, h, &cell).unwrap();
        for (a, b) in tape.value(h2).data().iter().zip(tape.value(h).data()) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn init_shapes_and_forget_bias() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut params = ParamSet::new();
        let cw = CellWeights::init(&mut params, "cell", CellKind::Lstm, 3, 5, &mut rng);
        assert_eq!(params.len(), 12);
        assert_eq!(params.value(cw.w[0]).shape(), &[5, 3]);
        assert_eq!(params.value(cw.u[0]).shape(), &[5, 5]);
        assert_eq!(params.value(cw.b[1]).data(), &[1.0; 5]); // forget gate
        assert_eq!(params.value(cw.b[0]).data(), &[0.0; 5]);
        // glorot limit respected
        let limit = (6.0 / 8.0f64).sqrt();
        assert!(params.value(cw.w[0]).data().iter().all(|v| v.abs() < limit));
    }

    #[test]
    fn same_seed_same_init() {
        let mut a = ParamSet::new();
        let mut b = ParamSet::new();
        let mut ra = ChaCha8Rng::seed_from_u64(42);
        let mut rb = ChaCha8Rng::seed_from_u64(42);
        CellWeights::init(&mut a, "c", CellKind::Gru, 4, 6, &mut ra);
        CellWeights::init(&mut b, "c", CellKind::Gru, 4, 6, &mut rb);
        assert_eq!(a, b);
    }
}
