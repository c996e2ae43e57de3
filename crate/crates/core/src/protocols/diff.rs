use rand::Rng;

use super::{LocalView, Protocol, RoundContext};
use crate::error::SimError;
use crate::net::TransferPlan;

/// Rand-Diff: on every directed edge `(u, v)` with `S(u) \ S(v)` nonempty,
/// `u` sends a token drawn uniformly from that difference.
#[derive(Clone, Copy, Debug, Default)]
pub struct RandDiff;

/// Sym-Diff: on every undirected edge a single token is drawn uniformly from
/// the symmetric difference and its holder sends it across.
#[derive(Clone, Copy, Debug, Default)]
pub struct SymDiff;

impl Protocol for RandDiff {
    fn name(&self) -> String {
        "rand-diff".into()
    }

    fn plan(&mut self, ctx: &RoundContext<'_>) -> Result<TransferPlan, SimError> {
        Ok(rand_diff_step(ctx))
    }
}

impl Protocol for SymDiff {
    fn name(&self) -> String {
        "sym-diff".into()
    }

    fn plan(&mut self, ctx: &RoundContext<'_>) -> Result<TransferPlan, SimError> {
        Ok(sym_diff_step(ctx))
    }
}

/// One node's Rand-Diff sends, drawing from `rng` in ascending neighbor order.
pub fn rand_diff_node(view: &LocalView<'_>, rng: &mut impl Rng, plan: &mut TransferPlan) {
    let own = view.own_tokens;
    for &(v, theirs) in view.neighbor_tokens.as_deref().unwrap_or_default() {
        let count = own.difference_len(theirs);
        if count > 0 {
            let rank = rng.gen_range(0..count);
            let token = own.nth_in_difference(theirs, rank).expect("rank below count");
            plan.push(view.node, v, token);
        }
    }
}

pub fn rand_diff_step(ctx: &RoundContext<'_>) -> TransferPlan {
    let mut plan = TransferPlan::new();
    for node in ctx.nodes() {
        if ctx.state.holdings(node).is_empty() {
            continue;
        }
        let view = ctx.neighbor_view(node);
        rand_diff_node(&view, &mut ctx.rng(node), &mut plan);
    }
    plan
}

/// Each undirected edge `{u, v}` (`u < v`) is decided with `u`'s stream.
pub fn sym_diff_step(ctx: &RoundContext<'_>) -> TransferPlan {
    let mut plan = TransferPlan::new();
    for u in ctx.nodes() {
        let view = ctx.neighbor_view(u);
        let mut rng = None;
        for &(v, theirs) in view.neighbor_tokens.as_deref().unwrap_or_default() {
            if v < u {
                continue;
            }
            let own = view.own_tokens;
            let count = own.symmetric_difference_len(theirs);
            if count == 0 {
                continue;
            }
            let rng = rng.get_or_insert_with(|| ctx.rng(u));
            let rank = rng.gen_range(0..count);
            let token = own.nth_in_symmetric_difference(theirs, rank).expect("rank below count");
            if own.contains(token) {
                plan.push(u, v, token);
            } else {
                plan.push(v, u, token);
            }
        }
    }
    plan
}
