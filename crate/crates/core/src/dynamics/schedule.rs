use crate::atom::AtomSpec;
use crate::error::{invalid, Result};

/// Activation-change instants and observation instants for one propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    t_start: f64,
    t_end: f64,
    events: Vec<f64>,
    samples: Vec<f64>,
}

impl Schedule {
    /// Collects the switching instants of `atoms` that fall strictly inside
    /// `(t_start, t_end)`. Sample times are sorted and deduplicated and must
    /// lie in `[t_start, t_end]`.
    pub fn new(atoms: &[AtomSpec], mut samples: Vec<f64>, t_start: f64, t_end: f64) -> Result<Self> {
        if !(t_start.is_finite() && t_end.is_finite() && t_end >= t_start) {
            return Err(invalid(format!("bad horizon [{t_start}, {t_end}]")));
        }
        if samples.iter().any(|t| !(t.is_finite() && *t >= t_start && *t <= t_end)) {
            return Err(invalid(format!("sample times must lie in [{t_start}, {t_end}]")));
        }
        samples.sort_by(f64::total_cmp);
        samples.dedup();
        let mut events: Vec<f64> = atoms
            .iter()
            .flat_map(|a| a.events())
            .filter(|&e| e > t_start && e < t_end)
            .collect();
        events.sort_by(f64::total_cmp);
        events.dedup();
        Ok(Self { t_start, t_end, events, samples })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn events(&self) -> &[f64] {
        &self.events
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Consecutive intervals with a fixed activation pattern.
    pub fn intervals(&self) -> Vec<(f64, f64)> {
        let mut bounds = Vec::with_capacity(self.events.len() + 2);
        bounds.push(self.t_start);
        bounds.extend_from_slice(&self.events);
        bounds.push(self.t_end);
        bounds.windows(2).map(|w| (w[0], w[1])).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::{Activation, AtomRole};

    #[test]
    fn intervals_split_on_events() {
        let atoms = vec![
            AtomSpec::new(1.0, 10.0, 0.1, vec![Activation::from(1.5)], AtomRole::Analyzer).unwrap(),
            AtomSpec::new(1.0, 10.0, 0.1, vec![Activation { t_on: 0.5, t_off: 2.0 }], AtomRole::Analyzer).unwrap(),
            AtomSpec::new(1.0, 10.0, 0.1, vec![Activation::from(1.5)], AtomRole::Analyzer).unwrap(),
            AtomSpec::always_on(1.0, 10.0, 0.1, AtomRole::Scatterer).unwrap(),
        ];
        let s = Schedule::new(&atoms, vec![3.0, 0.2, 0.2, 1.0], 0.0, 3.0).unwrap();
        assert_eq!(s.events(), &[0.5, 1.5, 2.0]);
        assert_eq!(s.samples(), &[0.2, 1.0, 3.0]);
        assert_eq!(s.intervals(), vec![(0.0, 0.5), (0.5, 1.5), (1.5, 2.0), (2.0, 3.0)]);
    }

    #[test]
    fn rejects_samples_outside_horizon() {
        assert!(Schedule::new(&[], vec![4.0], 0.0, 3.0).is_err());
        assert!(Schedule::new(&[], vec![], 1.0, 0.0).is_err());
    }
}
