//! The six observation networks of the Lorenz 96 experiments and nested
//! single-observation chains between them.

use crate::error::{Error, Result};
use crate::operators::ObservationNetwork;

pub const NETWORK_IDS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

/// Named network on an `n`-variable ring over `steps` steps. Indices are
/// zero-based, so "every 4th variable" is components `0, 4, 8, ..`.
///
/// With `n = 40`, `steps = 15`:
/// - `a`: component 0 at `t_15` (p = 1)
/// - `b`: every 8th component at `t_3, t_7, t_11, t_15` (p = 20)
/// - `c`: every 4th component at odd times (p = 80)
/// - `d`: every 2nd component at odd times (p = 160)
/// - `e`: every 2nd component at every time (p = 320)
/// - `f`: everything (p = 640)
pub fn build_network(id: &str, n: usize, steps: usize) -> Result<ObservationNetwork> {
    let pick = |stride: usize, times: &dyn Fn(usize) -> bool| {
        let pairs = (0..=steps)
            .filter(|&t| times(t))
            .flat_map(|t| (0..n).step_by(stride).map(move |c| (t, c)));
        ObservationNetwork::from_pairs(n, steps, pairs)
    };
    match id.trim().to_ascii_lowercase().as_str() {
        "a" => ObservationNetwork::from_pairs(n, steps, [(steps, 0)]),
        "b" => pick(8, &|t| t % 4 == 3),
        "c" => pick(4, &|t| t % 2 == 1),
        "d" => pick(2, &|t| t % 2 == 1),
        "e" => pick(2, &|_| true),
        "f" => Ok(ObservationNetwork::full(n, steps)),
        _ => Err(Error::UnknownNetwork(id.to_string())),
    }
}

/// Networks from `from` to `to` adding one observation at a time, in the
/// observation-vector order of `to`. The first entry is `from`, the last `to`.
pub fn single_observation_chain(from: &ObservationNetwork, to: &ObservationNetwork) -> Result<Vec<ObservationNetwork>> {
    if !from.is_subset_of(to) {
        return Err(Error::NotNested { step: 0 });
    }
    let mut chain = vec![from.clone()];
    for (t, c) in to.observations() {
        let last = chain.last().expect("non-empty");
        if !last.contains(t, c) {
            let next = last.with_observation(t, c)?;
            chain.push(next);
        }
    }
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cardinalities() {
        let p: Vec<usize> = NETWORK_IDS
            .iter()
            .map(|id| build_network(id, 40, 15).unwrap().p())
            .collect();
        assert_eq!(p, vec![1, 20, 80, 160, 320, 640]);
    }

    #[test]
    fn networks_are_nested() {
        let nets: Vec<_> = NETWORK_IDS.iter().map(|id| build_network(id, 40, 15).unwrap()).collect();
        for w in nets.windows(2) {
            assert!(w[0].is_subset_of(&w[1]));
        }
    }

    #[test]
    fn network_a_is_final_time() {
        let a = build_network("a", 40, 15).unwrap();
        assert_eq!(a.observations(), vec![(15, 0)]);
    }

    #[test]
    fn unknown_id() {
        assert!(matches!(build_network("g", 40, 15), Err(Error::UnknownNetwork(_))));
    }

    #[test]
    fn chain_adds_one_at_a_time() {
        let a = build_network("a", 40, 15).unwrap();
        let b = build_network("b", 40, 15).unwrap();
        let chain = single_observation_chain(&a, &b).unwrap();
        assert_eq!(chain.len(), 20);
        for (k, net) in chain.iter().enumerate() {
            assert_eq!(net.p(), k + 1);
        }
        assert_eq!(chain.last().unwrap(), &b);
        assert!(single_observation_chain(&b, &a).is_err());
    }
}
