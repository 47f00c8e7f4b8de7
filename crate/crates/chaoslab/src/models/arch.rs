//! Network architectures: canonical parameter layout per kind and forward
//! builders on the tape.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{ChaosError, Result};
use crate::models::ModelKind;
use crate::nncore::array::NumArray;
use crate::nncore::cells::{glorot_uniform, gru_cell, lstm_cell, rnn_cell, CellKind, CellNodes, CellWeights};
use crate::nncore::params::{ParamId, ParamSet};
use crate::nncore::tape::{NodeId, Tape};

/// Parameter ids of one model in a [`ParamSet`], registered in a canonical
/// order so checkpoints can rebuild the layout.
#[derive(Debug, Clone)]
pub enum Arch {
    /// VRNN / LSTM / GRU: one cell plus a linear head.
    Single {
        cell: CellWeights,
        head_w: ParamId,
        head_b: ParamId,
    },
    /// BIRNN: forward and backward vanilla cells, head on the concatenation.
    Bidirectional {
        fwd: CellWeights,
        bwd: CellWeights,
        head_w: ParamId,
        head_b: ParamId,
    },
    /// STRNN: two stacked vanilla cells.
    Stacked {
        first: CellWeights,
        second: CellWeights,
        head_w: ParamId,
        head_b: ParamId,
    },
    /// One tanh hidden layer.
    Ffnn {
        w1: ParamId,
        b1: ParamId,
        w2: ParamId,
        b2: ParamId,
    },
    /// Plain linear map.
    Linear { w: ParamId, b: ParamId },
    /// Closed-form AR coefficients.
    Ar { coeff: ParamId },
}

fn cell_kind_of(kind: ModelKind) -> CellKind {
    match kind {
        ModelKind::Lstm => CellKind::Lstm,
        ModelKind::Gru => CellKind::Gru,
        _ => CellKind::Vanilla,
    }
}

fn vanilla_at(base: usize) -> CellWeights {
    CellWeights {
        kind: CellKind::Vanilla,
        input: 0,
        hidden: 0,
        w: vec![ParamId(base)],
        u: vec![ParamId(base + 1)],
        b: vec![ParamId(base + 2)],
    }
}

impl Arch {
    /// Registers freshly initialized parameters for `kind` into `params`.
    /// `input_dim` is the per-step feature width for recurrent kinds and the
    /// full flattened width otherwise. AR registers a zero coefficient block
    /// of width `ar_features` to be filled by the least-squares fit.
    pub fn init(
        params: &mut ParamSet,
        kind: ModelKind,
        input_dim: usize,
        output_dim: usize,
        hidden: usize,
        ar_features: usize,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match kind {
            ModelKind::Vrnn | ModelKind::Lstm | ModelKind::Gru => {
                let cell = CellWeights::init(params, "cell", cell_kind_of(kind), input_dim, hidden, &mut rng);
                let head_w = params.add("head.w", glorot_uniform(&mut rng, output_dim, hidden));
                let head_b = params.add("head.b", NumArray::zeros(&[output_dim]));
                Arch::Single { cell, head_w, head_b }
            }
            ModelKind::Birnn => {
                let fwd = CellWeights::init(params, "fwd", CellKind::Vanilla, input_dim, hidden, &mut rng);
                let bwd = CellWeights::init(params, "bwd", CellKind::Vanilla, input_dim, hidden, &mut rng);
                let head_w = params.add("head.w", glorot_uniform(&mut rng, output_dim, 2 * hidden));
                let head_b = params.add("head.b", NumArray::zeros(&[output_dim]));
                Arch::Bidirectional { fwd, bwd, head_w, head_b }
            }
            ModelKind::Strnn => {
                let first = CellWeights::init(params, "layer1", CellKind::Vanilla, input_dim, hidden, &mut rng);
                let second = CellWeights::init(params, "layer2", CellKind::Vanilla, hidden, hidden, &mut rng);
                let head_w = params.add("head.w", glorot_uniform(&mut rng, output_dim, hidden));
                let head_b = params.add("head.b", NumArray::zeros(&[output_dim]));
                Arch::Stacked { first, second, head_w, head_b }
            }
            ModelKind::Ffnn => {
                let w1 = params.add("ffnn.w1", glorot_uniform(&mut rng, hidden, input_dim));
                let b1 = params.add("ffnn.b1", NumArray::zeros(&[hidden]));
                let w2 = params.add("ffnn.w2", glorot_uniform(&mut rng, output_dim, hidden));
                let b2 = params.add("ffnn.b2", NumArray::zeros(&[output_dim]));
                Arch::Ffnn { w1, b1, w2, b2 }
            }
            ModelKind::LinSgd => {
                let w = params.add("linear.w", NumArray::zeros(&[output_dim, input_dim]));
                let b = params.add("linear.b", NumArray::zeros(&[output_dim]));
                Arch::Linear { w, b }
            }
            ModelKind::Ar => {
                let coeff = params.add("ar.coeff", NumArray::zeros(&[output_dim, ar_features]));
                Arch::Ar { coeff }
            }
        }
    }

    /// Canonical parameter names in registration order (checkpoint layout).
    pub fn param_names(kind: ModelKind) -> Vec<String> {
        match kind {
            ModelKind::Vrnn | ModelKind::Lstm | ModelKind::Gru => {
                let mut names = CellWeights::param_names(cell_kind_of(kind), "cell");
                names.push("head.w".into());
                names.push("head.b".into());
                names
            }
            ModelKind::Birnn => {
                let mut names = CellWeights::param_names(CellKind::Vanilla, "fwd");
                names.extend(CellWeights::param_names(CellKind::Vanilla, "bwd"));
                names.push("head.w".into());
                names.push("head.b".into());
                names
            }
            ModelKind::Strnn => {
                let mut names = CellWeights::param_names(CellKind::Vanilla, "layer1");
                names.extend(CellWeights::param_names(CellKind::Vanilla, "layer2"));
                names.push("head.w".into());
                names.push("head.b".into());
                names
            }
            ModelKind::Ffnn => vec!["ffnn.w1".into(), "ffnn.b1".into(), "ffnn.w2".into(), "ffnn.b2".into()],
            ModelKind::LinSgd => vec!["linear.w".into(), "linear.b".into()],
            ModelKind::Ar => vec!["ar.coeff".into()],
        }
    }

    /// Rebuilds the id layout for a parameter set filled in canonical order
    /// (e.g. loaded from a checkpoint).
    pub fn relocate(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Vrnn | ModelKind::Lstm | ModelKind::Gru => {
                let ck = cell_kind_of(kind);
                let gates = ck.gate_count();
                Arch::Single {
                    cell: CellWeights {
                        kind: ck,
                        input: 0,
                        hidden: 0,
                        w: (0..gates).map(|g| ParamId(3 * g)).collect(),
                        u: (0..gates).map(|g| ParamId(3 * g + 1)).collect(),
                        b: (0..gates).map(|g| ParamId(3 * g + 2)).collect(),
                    },
                    head_w: ParamId(3 * gates),
                    head_b: ParamId(3 * gates + 1),
                }
            }
            ModelKind::Birnn => Arch::Bidirectional {
                fwd: vanilla_at(0),
                bwd: vanilla_at(3),
                head_w: ParamId(6),
                head_b: ParamId(7),
            },
            ModelKind::Strnn => Arch::Stacked {
                first: vanilla_at(0),
                second: vanilla_at(3),
                head_w: ParamId(6),
                head_b: ParamId(7),
            },
            ModelKind::Ffnn => Arch::Ffnn {
                w1: ParamId(0),
                b1: ParamId(1),
                w2: ParamId(2),
                b2: ParamId(3),
            },
            ModelKind::LinSgd => Arch::Linear {
                w: ParamId(0),
                b: ParamId(1),
            },
            ModelKind::Ar => Arch::Ar { coeff: ParamId(0) },
        }
    }
}

/// Tape-side leaf handles for one forward pass. Leaves are inserted in
/// parameter-set order so gradients pair up with the set one-to-one.
pub struct ForwardPass {
    kind: ModelKind,
    hidden: usize,
    cells: Vec<CellNodes>,
    ffnn_w1: Option<NodeId>,
    ffnn_b1: Option<NodeId>,
    head_w: Option<NodeId>,
    head_b: Option<NodeId>,
}

impl ForwardPass {
    pub fn insert(tape: &mut Tape, params: &ParamSet, arch: &Arch, kind: ModelKind, hidden: usize) -> Self {
        let leaf = |tape: &mut Tape, id: ParamId| tape.leaf(params.value(id).clone());
        let mut pass = Self {
            kind,
            hidden,
            cells: Vec::new(),
            ffnn_w1: None,
            ffnn_b1: None,
            head_w: None,
            head_b: None,
        };
        match arch {
            Arch::Single { cell, head_w, head_b } => {
                pass.cells.push(CellNodes::insert(tape, params, cell));
                pass.head_w = Some(leaf(tape, *head_w));
                pass.head_b = Some(leaf(tape, *head_b));
            }
            Arch::Bidirectional { fwd, bwd, head_w, head_b } => {
                pass.cells.push(CellNodes::insert(tape, params, fwd));
                pass.cells.push(CellNodes::insert(tape, params, bwd));
                pass.head_w = Some(leaf(tape, *head_w));
                pass.head_b = Some(leaf(tape, *head_b));
            }
            Arch::Stacked { first, second, head_w, head_b } => {
                pass.cells.push(CellNodes::insert(tape, params, first));
                pass.cells.push(CellNodes::insert(tape, params, second));
                pass.head_w = Some(leaf(tape, *head_w));
                pass.head_b = Some(leaf(tape, *head_b));
            }
            Arch::Ffnn { w1, b1, w2, b2 } => {
                pass.ffnn_w1 = Some(leaf(tape, *w1));
                pass.ffnn_b1 = Some(leaf(tape, *b1));
                pass.head_w = Some(leaf(tape, *w2));
                pass.head_b = Some(leaf(tape, *b2));
            }
            Arch::Linear { w, b } => {
                pass.head_w = Some(leaf(tape, *w));
                pass.head_b = Some(leaf(tape, *b));
            }
            Arch::Ar { .. } => {}
        }
        pass
    }

    /// Leaf node ids aligned with the parameter set's registration order.
    pub fn param_leaves(&self) -> Vec<NodeId> {
        let mut ids = Vec::new();
        for cell in &self.cells {
            for g in 0..cell.kind.gate_count() {
                ids.push(cell.w[g]);
                ids.push(cell.u[g]);
                ids.push(cell.b[g]);
            }
        }
        if let (Some(w1), Some(b1)) = (self.ffnn_w1, self.ffnn_b1) {
            ids.push(w1);
            ids.push(b1);
        }
        if let Some(w) = self.head_w {
            ids.push(w);
        }
        if let Some(b) = self.head_b {
            ids.push(b);
        }
        ids
    }

    fn head(&self, tape: &mut Tape, h: NodeId) -> Result<NodeId> {
        let wh = tape.matmul(self.head_w.expect("head present"), h)?;
        tape.add(wh, self.head_b.expect("head present"))
    }

    /// Per-step outputs for a feature sequence, or only the final step's
    /// output when `final_only` (the sliding-window adapter).
    pub fn sequence_outputs(&self, tape: &mut Tape, xs: &[NodeId], final_only: bool) -> Result<Vec<NodeId>> {
        if xs.is_empty() {
            return Err(ChaosError::InvalidParams("empty input sequence".into()));
        }
        match self.kind {
            ModelKind::Vrnn | ModelKind::Lstm | ModelKind::Gru => {
                let cell = &self.cells[0];
                let mut h = tape.leaf(NumArray::zeros(&[self.hidden]));
                let mut c = tape.leaf(NumArray::zeros(&[self.hidden]));
                let mut outs = Vec::new();
                for (i, x) in xs.iter().enumerate() {
                    match self.kind {
                        ModelKind::Lstm => {
                            let (h2, c2) = lstm_cell(tape, *x, h, c, cell)?;
                            h = h2;
                            c = c2;
                        }
                        ModelKind::Gru => h = gru_cell(tape, *x, h, cell)?,
                        _ => h = rnn_cell(tape, *x, h, cell)?,
                    }
                    if !final_only || i + 1 == xs.len() {
                        outs.push(self.head(tape, h)?);
                    }
                }
                Ok(outs)
            }
            ModelKind::Birnn => {
                let (fwd, bwd) = (&self.cells[0], &self.cells[1]);
                let mut hf = tape.leaf(NumArray::zeros(&[self.hidden]));
                let mut forward = Vec::with_capacity(xs.len());
                for x in xs {
                    hf = rnn_cell(tape, *x, hf, fwd)?;
                    forward.push(hf);
                }
                let mut hb = tape.leaf(NumArray::zeros(&[self.hidden]));
                let mut backward = vec![hb; xs.len()];
                for (i, x) in xs.iter().enumerate().rev() {
                    hb = rnn_cell(tape, *x, hb, bwd)?;
                    backward[i] = hb;
                }
                let mut outs = Vec::new();
                if final_only {
                    let cat = tape.concat(forward[xs.len() - 1], backward[0])?;
                    outs.push(self.head(tape, cat)?);
                } else {
                    for i in 0..xs.len() {
                        let cat = tape.concat(forward[i], backward[i])?;
                        outs.push(self.head(tape, cat)?);
                    }
                }
                Ok(outs)
            }
            ModelKind::Strnn => {
                let (first, second) = (&self.cells[0], &self.cells[1]);
                let mut h1 = tape.leaf(NumArray::zeros(&[self.hidden]));
                let mut h2 = tape.leaf(NumArray::zeros(&[self.hidden]));
                let mut outs = Vec::new();
                for (i, x) in xs.iter().enumerate() {
                    h1 = rnn_cell(tape, *x, h1, first)?;
                    h2 = rnn_cell(tape, h1, h2, second)?;
                    if !final_only || i + 1 == xs.len() {
                        outs.push(self.head(tape, h2)?);
                    }
                }
                Ok(outs)
            }
            ModelKind::Ffnn => {
                let pointwise = if final_only { &xs[xs.len() - 1..] } else { xs };
                let mut outs = Vec::new();
                for x in pointwise {
                    let pre = tape.matmul(self.ffnn_w1.expect("ffnn"), *x)?;
                    let pre = tape.add(pre, self.ffnn_b1.expect("ffnn"))?;
                    let hidden = tape.tanh(pre);
                    outs.push(self.head(tape, hidden)?);
                }
                Ok(outs)
            }
            ModelKind::LinSgd => {
                let pointwise = if final_only { &xs[xs.len() - 1..] } else { xs };
                pointwise.iter().map(|x| self.head(tape, *x)).collect()
            }
            ModelKind::Ar => Err(ChaosError::Config("AR has no tape forward pass".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn param_leaves_align_with_registration_order() {
        for kind in crate::models::ALL_KINDS {
            if kind == ModelKind::Ar {
                continue;
            }
            let mut params = ParamSet::new();
            let arch = Arch::init(&mut params, kind, 3, 2, 4, 0, 1);
            let names = Arch::param_names(kind);
            assert_eq!(params.len(), names.len(), "{kind}");
            for (id, name) in params.ids().zip(&names) {
                assert_eq!(params.name(id), name, "{kind}");
            }
            let mut tape = Tape::new();
            let pass = ForwardPass::insert(&mut tape, &params, &arch, kind, 4);
            let leaves = pass.param_leaves();
            assert_eq!(leaves.len(), params.len(), "{kind}");
            for (leaf, id) in leaves.iter().zip(params.ids()) {
                assert_eq!(tape.value(*leaf), params.value(id), "{kind}");
            }
        }
    }

    #[test]
    fn forward_shapes_per_kind() {
        for kind in crate::models::ALL_KINDS {
            if kind == ModelKind::Ar {
                continue;
            }
            let mut params = ParamSet::new();
            let arch = Arch::init(&mut params, kind, 3, 2, 4, 0, 9);
            let mut tape = Tape::new();
            let pass = ForwardPass::insert(&mut tape, &params, &arch, kind, 4);
            let xs: Vec<NodeId> = (0..5)
                .map(|i| tape.leaf(NumArray::vector(vec![0.1 * i as f64, 0.2, 0.3])))
                .collect();
            let all = pass.sequence_outputs(&mut tape, &xs, false).unwrap();
            assert_eq!(all.len(), 5, "{kind}");
            for out in &all {
                assert_eq!(tape.value(*out).shape(), &[2], "{kind}");
            }
            let last = pass.sequence_outputs(&mut tape, &xs, true).unwrap();
            assert_eq!(last.len(), 1, "{kind}");
        }
    }

    #[test]
    fn relocate_matches_init_layout() {
        for kind in crate::models::ALL_KINDS {
            let mut params = ParamSet::new();
            let a = Arch::init(&mut params, kind, 3, 2, 4, 7, 1);
            let b = Arch::relocate(kind);
            // compare the head ids, enough to catch layout drift
            match (&a, &b) {
                (Arch::Single { head_w: x, .. }, Arch::Single { head_w: y, .. }) => assert_eq!(x, y),
                (Arch::Bidirectional { head_w: x, .. }, Arch::Bidirectional { head_w: y, .. }) => {
                    assert_eq!(x, y)
                }
                (Arch::Stacked { head_w: x, .. }, Arch::Stacked { head_w: y, .. }) => assert_eq!(x, y),
                (Arch::Ffnn { w2: x, .. }, Arch::Ffnn { w2: y, .. }) => assert_eq!(x, y),
                (Arch::Linear { w: x, .. }, Arch::Linear { w: y, .. }) => assert_eq!(x, y),
                (Arch::Ar { coeff: x }, Arch::Ar { coeff: y }) => assert_eq!(x, y),
                _ => panic!("variant mismatch for {kind}"),
            }
        }
    }
}
