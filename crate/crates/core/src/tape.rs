//! Reverse-mode differentiation over a linear operation tape.
//!
//! Ops (see [`crate::ops`]) append their forward value plus a backward
//! closure; [`Tape::backward`] replays the closures in reverse and
//! accumulates gradients. Every node's inputs precede it on the tape
//! by construction, so reverse order is a valid topological order.
//!
//! A tape is single-use per forward pass and never shared across
//! concurrent executions; independent passes may run on independent
//! tapes in parallel.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::fmath;
use crate::tensor::Tensor;

/// Default finite-difference step for [`grad_check`].
pub const FD_STEP: f64 = 1e-5;

/// Handle to a tensor recorded on a tape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TensorId(pub(crate) u32);

/// Context handed to backward closures.
pub struct BackCtx<'a> {
    vals: &'a [Tensor],
    needs: &'a [bool],
    out: TensorId,
    /// Gradient of the loss w.r.t. this node's output.
    pub gout: &'a [f64],
    grads: &'a mut [Option<Vec<f64>>],
}

impl<'a> BackCtx<'a> {
    /// Forward value of `id`. The returned borrow is tied to the tape
    /// storage, not to `self`, so it stays usable inside [`Self::accum`].
    #[inline]
    pub fn val(&self, id: TensorId) -> &'a Tensor {
        &self.vals[id.0 as usize]
    }

    #[inline]
    pub fn needs(&self, id: TensorId) -> bool {
        self.needs[id.0 as usize]
    }

    /// Id of the node whose backward rule is running; lets rules that
    /// reuse their forward output (softmax) read it back.
    #[inline]
    pub fn self_id(&self) -> TensorId {
        self.out
    }

    /// Accumulate into the gradient buffer of `id`. No-op when nothing
    /// upstream of `id` requires gradient.
    #[inline]
    pub fn accum(&mut self, id: TensorId, f: impl FnOnce(&mut [f64])) {
        if !self.needs[id.0 as usize] {
            return;
        }
        let len = self.vals[id.0 as usize].len();
        let g = self.grads[id.0 as usize].get_or_insert_with(|| vec![0.0; len]);
        f(g);
    }
}

type BackwardFn = Box<dyn Fn(&mut BackCtx<'_>)>;

struct Node {
    out: u32,
    backward: BackwardFn,
}

/// Recording of one forward pass.
pub struct Tape {
    vals: Vec<Tensor>,
    needs: Vec<bool>,
    nodes: Vec<Node>,
    grads: Vec<Option<Vec<f64>>>,
}

impl Default for Tape {
    fn default() -> Self {
        Self::new()
    }
}

impl Tape {
    pub fn new() -> Self {
        Tape {
            vals: Vec::new(),
            needs: Vec::new(),
            nodes: Vec::new(),
            grads: Vec::new(),
        }
    }

    /// Record a constant input; no gradient will be tracked through it.
    pub fn leaf(&mut self, t: Tensor) -> TensorId {
        self.push(t, false)
    }

    /// Record a differentiable input (parameter or checked tensor).
    pub fn var(&mut self, t: Tensor) -> TensorId {
        self.push(t, true)
    }

    fn push(&mut self, t: Tensor, needs: bool) -> TensorId {
        let id = self.vals.len() as u32;
        self.vals.push(t);
        self.needs.push(needs);
        self.grads.push(None);
        TensorId(id)
    }

    /// Record an op output. The backward closure is kept only when some
    /// input requires gradient.
    pub(crate) fn record(
        &mut self,
        out: Tensor,
        inputs: &[TensorId],
        backward: impl Fn(&mut BackCtx<'_>) + 'static,
    ) -> TensorId {
        let needs = inputs.iter().any(|i| self.needs[i.0 as usize]);
        let id = self.push(out, needs);
        if needs {
            self.nodes.push(Node {
                out: id.0,
                backward: Box::new(backward),
            });
        }
        id
    }

    #[inline]
    pub fn value(&self, id: TensorId) -> &Tensor {
        &self.vals[id.0 as usize]
    }

    /// Gradient of the last backward pass w.r.t. `id`, if it was reached.
    /// Present gradients always have the same length as the value.
    pub fn grad(&self, id: TensorId) -> Option<&[f64]> {
        self.grads[id.0 as usize].as_deref()
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    /// Populate gradients of everything that requires them, seeding the
    /// scalar `root` with d root / d root = 1.
    pub fn backward(&mut self, root: TensorId) -> Result<(), Error> {
        if !self.vals[root.0 as usize].is_scalar() {
            return Err(Error::Config {
                op: "backward",
                msg: alloc::format!(
                    "root must be scalar, got dims {:?}",
                    self.vals[root.0 as usize].dims()
                ),
            });
        }
        for g in self.grads.iter_mut() {
            *g = None;
        }
        self.grads[root.0 as usize] = Some(vec![1.0]);
        for node in self.nodes.iter().rev() {
            let Some(gout) = self.grads[node.out as usize].take() else {
                continue;
            };
            let mut ctx = BackCtx {
                vals: &self.vals,
                needs: &self.needs,
                out: TensorId(node.out),
                gout: &gout,
                grads: &mut self.grads,
            };
            (node.backward)(&mut ctx);
            self.grads[node.out as usize] = Some(gout);
        }
        Ok(())
    }
}

fn eval_scalar<F>(f: &F, x: &Tensor) -> Result<f64, Error>
where
    F: Fn(&mut Tape, TensorId) -> Result<TensorId, Error>,
{
    let mut tape = Tape::new();
    let xid = tape.leaf(x.clone());
    let out = f(&mut tape, xid)?;
    let v = tape.value(out);
    if !v.is_scalar() {
        return Err(Error::Config {
            op: "grad_check",
            msg: alloc::format!("f must be scalar-valued, got dims {:?}", v.dims()),
        });
    }
    Ok(v.data()[0])
}

/// Compare the tape gradient of a scalar-valued `f` at `x` against
/// central finite differences with step `h`. Returns the max over
/// coordinates of |analytic - numeric| / (|numeric| + 1e-8).
pub fn grad_check<F>(f: F, x: &Tensor, h: f64) -> Result<f64, Error>
where
    F: Fn(&mut Tape, TensorId) -> Result<TensorId, Error>,
{
    let coords: Vec<usize> = (0..x.len()).collect();
    grad_check_coords(f, x, h, &coords)
}

/// [`grad_check`] restricted to a subset of coordinates; used where a
/// full sweep is too expensive (deep composite functions).
pub fn grad_check_coords<F>(f: F, x: &Tensor, h: f64, coords: &[usize]) -> Result<f64, Error>
where
    F: Fn(&mut Tape, TensorId) -> Result<TensorId, Error>,
{
    let mut tape = Tape::new();
    let xid = tape.var(x.clone());
    let out = f(&mut tape, xid)?;
    if !tape.value(out).is_scalar() {
        return Err(Error::Config {
            op: "grad_check",
            msg: alloc::format!(
                "f must be scalar-valued, got dims {:?}",
                tape.value(out).dims()
            ),
        });
    }
    tape.backward(out)?;
    let analytic: Vec<f64> = match tape.grad(xid) {
        Some(g) => g.to_vec(),
        None => vec![0.0; x.len()],
    };

    let mut max_rel: f64 = 0.0;
    for &i in coords {
        let mut xp = x.clone();
        xp.data_mut()[i] += h;
        let fp = eval_scalar(&f, &xp)?;
        let mut xm = x.clone();
        xm.data_mut()[i] -= h;
        let fm = eval_scalar(&f, &xm)?;
        let numeric = (fp - fm) / (2.0 * h);
        let rel = fmath::abs(analytic[i] - numeric) / (fmath::abs(numeric) + 1e-8);
        if rel > max_rel {
            max_rel = rel;
        }
    }
    Ok(max_rel)
}
