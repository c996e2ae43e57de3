use rand::{Rng, RngCore};

use super::{LocalView, Protocol, RoundContext};
use crate::error::SimError;
use crate::net::{NodeId, Round, TokenId, TokenState, TransferPlan};

/// Tolerance for floating-point mass and symmetry comparisons.
const EPS: f64 = 1e-9;

/// Inputs an SKB policy may condition on besides a token's arrival time.
#[derive(Clone, Copy, Debug)]
pub struct SkbContext {
    pub round: Round,
    pub node: NodeId,
    /// Number of tokens the node holds at the start of the round.
    pub held: usize,
}

/// A symmetric knowledge-based sending rule.
///
/// `probability` is the chance that the node broadcasts `token` this round;
/// `arrival` is `None` when the token is not held. A well-formed policy
/// ignores `token` and looks only at `arrival`; the checker catches the
/// rest.
pub trait SkbPolicy: Send + Sync {
    fn probability(&self, ctx: &SkbContext, token: TokenId, arrival: Option<Round>) -> f64;

    /// Draws the token to broadcast, or `None` to idle. Verifies the node's
    /// weights on the way.
    fn sample(
        &self,
        ctx: &SkbContext,
        arrivals: &[(Round, TokenId)],
        rng: &mut dyn RngCore,
    ) -> Result<Option<TokenId>, PolicyViolation> {
        let weights = node_weights(self, ctx, arrivals)?;
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (&(_, token), w) in arrivals.iter().zip(weights) {
            acc += w;
            if u < acc {
                return Ok(Some(token));
            }
        }
        Ok(None)
    }
}

/// Weights of the held tokens in arrival-log order, checked for symmetry,
/// sign and total mass.
fn node_weights<P: SkbPolicy + ?Sized>(
    policy: &P,
    ctx: &SkbContext,
    arrivals: &[(Round, TokenId)],
) -> Result<Vec<f64>, PolicyViolation> {
    let mut weights = Vec::with_capacity(arrivals.len());
    let mut mass = 0.0;
    let mut class: Option<(Round, TokenId, f64)> = None;
    for &(at, token) in arrivals {
        let w = policy.probability(ctx, token, Some(at));
        if !(w >= 0.0 && w <= 1.0 + EPS) {
            return Err(PolicyViolation::InvalidWeight {
                node: ctx.node,
                round: ctx.round,
                token,
                weight: w,
            });
        }
        match class {
            Some((r, first, fw)) if r == at => {
                if (fw - w).abs() > EPS {
                    return Err(PolicyViolation::Asymmetric {
                        node: ctx.node,
                        round: ctx.round,
                        arrival: at,
                        first,
                        second: token,
                        weights: (fw, w),
                    });
                }
            }
            _ => class = Some((at, token, w)),
        }
        mass += w;
        weights.push(w);
    }
    if mass > 1.0 + EPS {
        return Err(PolicyViolation::ExcessMass {
            node: ctx.node,
            round: ctx.round,
            mass,
        });
    }
    Ok(weights)
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum PolicyViolation {
    #[error("round {round}, node {node}: tokens {first} and {second} both arrived at {arrival} but weigh {weights:?}")]
    Asymmetric {
        node: NodeId,
        round: Round,
        arrival: Round,
        first: TokenId,
        second: TokenId,
        weights: (f64, f64),
    },
    #[error("round {round}, node {node}: total mass {mass} exceeds 1")]
    ExcessMass { node: NodeId, round: Round, mass: f64 },
    #[error("round {round}, node {node}: unheld token {token} has weight {weight}")]
    UnheldMass {
        node: NodeId,
        round: Round,
        token: TokenId,
        weight: f64,
    },
    #[error("round {round}, node {node}: token {token} has invalid weight {weight}")]
    InvalidWeight {
        node: NodeId,
        round: Round,
        token: TokenId,
        weight: f64,
    },
}

/// Uniform over held tokens, never idle.
#[derive(Clone, Copy, Debug, Default)]
pub struct UniformSkb;

pub fn uniform_skb() -> UniformSkb {
    UniformSkb
}

impl SkbPolicy for UniformSkb {
    fn probability(&self, ctx: &SkbContext, _token: TokenId, arrival: Option<Round>) -> f64 {
        match arrival {
            Some(_) if ctx.held > 0 => 1.0 / ctx.held as f64,
            _ => 0.0,
        }
    }

    fn sample(
        &self,
        _ctx: &SkbContext,
        arrivals: &[(Round, TokenId)],
        rng: &mut dyn RngCore,
    ) -> Result<Option<TokenId>, PolicyViolation> {
        if arrivals.is_empty() {
            return Ok(None);
        }
        Ok(Some(arrivals[rng.gen_range(0..arrivals.len())].1))
    }
}

#[derive(Clone, Debug, Default)]
pub struct SkbPolicyReport {
    pub nodes_checked: usize,
    pub violations: Vec<PolicyViolation>,
}

impl SkbPolicyReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks symmetry, the mass bound and zero mass on unheld tokens at every
/// node of `state` for `round`. At most one violation is listed per node.
pub fn check_skb_policy(policy: &dyn SkbPolicy, state: &TokenState, round: Round) -> SkbPolicyReport {
    let mut report = SkbPolicyReport::default();
    for node in (0..state.n() as u32).map(NodeId) {
        report.nodes_checked += 1;
        let held = state.holdings(node);
        let ctx = SkbContext {
            round,
            node,
            held: held.len(),
        };
        if let Err(v) = node_weights(policy, &ctx, state.arrivals(node)) {
            report.violations.push(v);
            continue;
        }
        for token in (0..state.universe() as u32).map(TokenId) {
            if held.contains(token) {
                continue;
            }
            let weight = policy.probability(&ctx, token, None);
            if weight != 0.0 {
                report.violations.push(PolicyViolation::UnheldMass {
                    node,
                    round,
                    token,
                    weight,
                });
                break;
            }
        }
    }
    report
}

/// One SKB node's decision: the sampled token goes to every neighbor.
pub fn skb_step(
    policy: &dyn SkbPolicy,
    view: &LocalView<'_>,
    neighbors: &[NodeId],
    rng: &mut dyn RngCore,
    plan: &mut TransferPlan,
) -> Result<(), PolicyViolation> {
    let arrivals = view.arrivals.unwrap_or_default();
    let ctx = SkbContext {
        round: view.round,
        node: view.node,
        held: view.own_tokens.len(),
    };
    if let Some(token) = policy.sample(&ctx, arrivals, rng)? {
        for &v in neighbors {
            plan.push(view.node, v, token);
        }
    }
    Ok(())
}

pub struct SkbProtocol {
    policy: Box<dyn SkbPolicy>,
}

impl SkbProtocol {
    pub fn new(policy: Box<dyn SkbPolicy>) -> Self {
        SkbProtocol { policy }
    }
}

impl Protocol for SkbProtocol {
    fn name(&self) -> String {
        "skb".into()
    }

    fn plan(&mut self, ctx: &RoundContext<'_>) -> Result<TransferPlan, SimError> {
        let mut plan = TransferPlan::new();
        for node in ctx.nodes() {
            let view = ctx.history_view(node);
            if view.own_tokens.is_empty() {
                continue;
            }
            let mut rng = ctx.rng(node);
            skb_step(self.policy.as_ref(), &view, ctx.adjacency.neighbors(node), &mut rng, &mut plan)
                .map_err(|v| SimError::Protocol(v.to_string()))?;
        }
        Ok(plan)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Skewed;
    impl SkbPolicy for Skewed {
        fn probability(&self, _ctx: &SkbContext, token: TokenId, arrival: Option<Round>) -> f64 {
            match arrival {
                None => 0.0,
                Some(_) if token == TokenId(0) => 0.4,
                Some(_) => 0.2,
            }
        }
    }

    struct Greedy;
    impl SkbPolicy for Greedy {
        fn probability(&self, _ctx: &SkbContext, _token: TokenId, arrival: Option<Round>) -> f64 {
            if arrival.is_some() { 0.6 } else { 0.0 }
        }
    }

    struct Leaky;
    impl SkbPolicy for Leaky {
        fn probability(&self, _ctx: &SkbContext, _token: TokenId, arrival: Option<Round>) -> f64 {
            if arrival.is_some() { 0.0 } else { 0.01 }
        }
    }

    fn two_tokens_at_round_3() -> TokenState {
        let mut s = TokenState::new(1, 3, 3);
        s.give(NodeId(0), TokenId(2));
        crate::net::apply_round(
            &mut s,
            &crate::net::NetworkSnapshot::new(1, []).adjacency(),
            &TransferPlan::new(),
            &[],
        )
        .unwrap();
        s
    }

    #[test]
    fn uniform_passes() {
        let s = TokenState::single_source(3, 4, NodeId(1));
        assert!(check_skb_policy(&UniformSkb, &s, 1).is_ok());
    }

    #[test]
    fn asymmetric_policy_is_caught_with_witness() {
        let mut s = TokenState::new(1, 2, 2);
        s.give(NodeId(0), TokenId(0));
        s.give(NodeId(0), TokenId(1));
        let report = check_skb_policy(&Skewed, &s, 3);
        match &report.violations[..] {
            [PolicyViolation::Asymmetric { node, first, second, .. }] => {
                assert_eq!(*node, NodeId(0));
                assert_eq!((*first, *second), (TokenId(0), TokenId(1)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn excess_mass_and_unheld_mass_are_caught() {
        let mut s = TokenState::new(1, 2, 2);
        s.give(NodeId(0), TokenId(0));
        s.give(NodeId(0), TokenId(1));
        let report = check_skb_policy(&Greedy, &s, 1);
        assert!(matches!(report.violations[..], [PolicyViolation::ExcessMass { .. }]));
        let s = two_tokens_at_round_3();
        let report = check_skb_policy(&Leaky, &s, 2);
        assert!(matches!(report.violations[..], [PolicyViolation::UnheldMass { .. }]));
    }

    #[test]
    fn uniform_weights() {
        let ctx = SkbContext { round: 6, node: NodeId(0), held: 2 };
        assert_eq!(UniformSkb.probability(&ctx, TokenId(0), Some(0)), 0.5);
        assert_eq!(UniformSkb.probability(&ctx, TokenId(1), Some(5)), 0.5);
        let empty = SkbContext { held: 0, ..ctx };
        assert_eq!(UniformSkb.probability(&empty, TokenId(0), None), 0.0);
    }
}
