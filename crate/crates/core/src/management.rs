//! The piecewise-constant periodic management coefficient.
//!
//! Within one period `(0, t0]` the coefficient is `-gamma_minus` on `(0, t*]`
//! and `+gamma_plus` on `(t*, t0]`, extended periodically. Evaluation uses the
//! rescaled time `t / epsilon`. A reversed map evaluates the forward map at
//! `pivot - t`, taken as the limit from the left so that every map stays
//! left-continuous.
//!
//! Interface times are generated from `(t*, t0, epsilon, pivot)` directly, so
//! the propagator can land on them exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used to merge generated interfaces with window ends.
const SNAP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionMap {
    pub gamma_minus: f64,
    pub gamma_plus: f64,
    pub t_star: f64,
    pub t_period: f64,
    #[serde(default = "unit")]
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reversed_pivot: Option<f64>,
}

fn unit() -> f64 {
    1.0
}

impl DispersionMap {
    pub fn new(gamma_minus: f64, gamma_plus: f64, t_star: f64, t_period: f64) -> Result<Self> {
        let map = Self {
            gamma_minus,
            gamma_plus,
            t_star,
            t_period,
            epsilon: 1.0,
            reversed_pivot: None,
        };
        map.validate()?;
        Ok(map)
    }

    /// `gamma = -1` on `(0, 1]`, `+1` on `(1, 2]`, period 2.
    pub fn normalized() -> Self {
        Self {
            gamma_minus: 1.0,
            gamma_plus: 1.0,
            t_star: 1.0,
            t_period: 2.0,
            epsilon: 1.0,
            reversed_pivot: None,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        self.epsilon = epsilon;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.gamma_minus, self.gamma_plus, self.t_star, self.t_period, self.epsilon]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidMap("non-finite parameter".into()));
        }
        if !(self.gamma_minus > 0.0 && self.gamma_plus > 0.0) {
            return Err(Error::InvalidMap(format!(
                "gamma magnitudes must be positive (got {}, {})",
                self.gamma_minus, self.gamma_plus
            )));
        }
        if !(self.t_star > 0.0 && self.t_star < self.t_period) {
            return Err(Error::InvalidMap(format!(
                "need 0 < t_star < t_period (got {}, {})",
                self.t_star, self.t_period
            )));
        }
        if self.epsilon <= 0.0 {
            return Err(Error::InvalidMap(format!("epsilon must be positive (got {})", self.epsilon)));
        }
        if let Some(p) = self.reversed_pivot {
            if !p.is_finite() {
                return Err(Error::InvalidMap("non-finite pivot".into()));
            }
        }
        Ok(())
    }

    /// Period in physical time, `epsilon * t0`.
    pub fn physical_period(&self) -> f64 {
        self.epsilon * self.t_period
    }

    pub fn is_reversed(&self) -> bool {
        self.reversed_pivot.is_some()
    }

    /// Time reversal about `pivot`. Reversing a reversed map about its own
    /// pivot gives back the forward map.
    pub fn reversed(&self, pivot: f64) -> Result<Self> {
        let mut out = *self;
        match self.reversed_pivot {
            None => out.reversed_pivot = Some(pivot),
            Some(p) if p == pivot => out.reversed_pivot = None,
            Some(p) => {
                return Err(Error::InvalidMap(format!(
                    "cannot reverse a map reversed about {p} around a different pivot {pivot}"
                )))
            }
        }
        out.validate()?;
        Ok(out)
    }

    pub fn gamma_at(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        Ok(self.value_at(t))
    }

    fn value_at(&self, t: f64) -> f64 {
        match self.reversed_pivot {
            None => {
                // s in (0, t0]
                let mut s = (t / self.epsilon).rem_euclid(self.t_period);
                if s == 0.0 {
                    s = self.t_period;
                }
                if s <= self.t_star {
                    -self.gamma_minus
                } else {
                    self.gamma_plus
                }
            }
            Some(pivot) => {
                // right limit of the forward map at pivot - t: s in [0, t0)
                let s = ((pivot - t) / self.epsilon).rem_euclid(self.t_period);
                if s < self.t_star {
                    -self.gamma_minus
                } else {
                    self.gamma_plus
                }
            }
        }
    }

    /// Discontinuity times strictly inside `(begin, end)`, ascending.
    fn interfaces(&self, begin: f64, end: f64) -> Vec<f64> {
        let eps = self.epsilon;
        let (t0, ts) = (self.t_period, self.t_star);
        let (lo, hi) = match self.reversed_pivot {
            None => (begin / eps, end / eps),
            Some(p) => ((p - end) / eps, (p - begin) / eps),
        };
        let first = (lo / t0).floor() as i64 - 1;
        let last = (hi / t0).ceil() as i64 + 1;
        let tol = SNAP * end.abs().max(1.0);
        let mut out = Vec::new();
        for j in first..=last {
            let base = j as f64 * t0;
            for offset in [base, base + ts] {
                let t = match self.reversed_pivot {
                    None => eps * offset,
                    Some(p) => p - eps * offset,
                };
                if t > begin + tol && t < end - tol {
                    out.push(t);
                }
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).expect("finite interfaces"));
        out.dedup();
        out
    }
}

/// One maximal interval `(start, end]` of constant coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub start: f64,
    pub end: f64,
    pub gamma: f64,
}

impl Layer {
    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn contains(&self, t: f64) -> bool {
        t > self.start && t <= self.end
    }
}

/// Time-dependent coefficient driving a run: either constant (plain NLS) or
/// a periodic management map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaSchedule {
    Periodic(DispersionMap),
    Constant { constant: f64 },
}

impl From<DispersionMap> for GammaSchedule {
    fn from(map: DispersionMap) -> Self {
        GammaSchedule::Periodic(map)
    }
}

impl GammaSchedule {
    /// Plain focusing equation, `gamma == -1` for all time.
    pub fn focusing() -> Self {
        GammaSchedule::Constant { constant: -1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GammaSchedule::Periodic(m) => m.validate(),
            GammaSchedule::Constant { constant } => {
                if constant.is_finite() && *constant != 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidMap(format!("constant coefficient {constant}")))
                }
            }
        }
    }

    pub fn gamma_at(&self, t: f64) -> Result<f64> {
        match self {
            GammaSchedule::Periodic(m) => m.gamma_at(t),
            GammaSchedule::Constant { constant } => {
                if t < 0.0 {
                    Err(Error::NegativeTime(t))
                } else {
                    Ok(*constant)
                }
            }
        }
    }

    pub fn period(&self) -> Option<f64> {
        match self {
            GammaSchedule::Periodic(m) => Some(m.physical_period()),
            GammaSchedule::Constant { .. } => None,
        }
    }

    /// Contiguous constant-coefficient intervals tiling `(t_begin, t_end]`.
    pub fn layer_partition(&self, t_begin: f64, t_end: f64) -> Result<Vec<Layer>> {
        if t_begin < 0.0 {
            return Err(Error::NegativeTime(t_begin));
        }
        if !(t_end > t_begin) {
            return Err(Error::EmptyWindow {
                begin: t_begin,
                end: t_end,
            });
        }
        self.validate()?;
        let map = match self {
            GammaSchedule::Constant { constant } => {
                return Ok(vec![Layer {
                    start: t_begin,
                    end: t_end,
                    gamma: *constant,
                }])
            }
            GammaSchedule::Periodic(m) => m,
        };
        let mut cuts = vec![t_begin];
        cuts.extend(map.interfaces(t_begin, t_end));
        cuts.push(t_end);
        Ok(cuts
            .windows(2)
            .map(|w| Layer {
                start: w[0],
                end: w[1],
                gamma: map.value_at(0.5 * (w[0] + w[1])),
            })
            .collect())
    }
}

/// Free-function form of [`GammaSchedule::layer_partition`].
pub fn layer_partition(schedule: &GammaSchedule, t_begin: f64, t_end: f64) -> Result<Vec<Layer>> {
    schedule.layer_partition(t_begin, t_end)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sched(m: DispersionMap) -> GammaSchedule {
        GammaSchedule::Periodic(m)
    }

    #[test]
    fn normalized_values() {
        let m = DispersionMap::normalized();
        assert_eq!(m.gamma_at(0.5).unwrap(), -1.0);
        assert_eq!(m.gamma_at(2.5).unwrap(), -1.0);
        assert_eq!(m.gamma_at(0.0).unwrap(), 1.0);
        assert_eq!(m.gamma_at(1.0).unwrap(), -1.0);
        assert_eq!(m.gamma_at(1.5).unwrap(), 1.0);
        assert_eq!(m.gamma_at(2.0).unwrap(), 1.0);
        assert!(matches!(m.gamma_at(-0.1), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn normalized_partition() {
        let layers = sched(DispersionMap::normalized()).layer_partition(0.0, 5.0).unwrap();
        let ends: Vec<_> = layers.iter().map(|l| (l.start, l.end, l.gamma)).collect();
        assert_eq!(
            ends,
            vec![
                (0.0, 1.0, -1.0),
                (1.0, 2.0, 1.0),
                (2.0, 3.0, -1.0),
                (3.0, 4.0, 1.0),
                (4.0, 5.0, -1.0)
            ]
        );
    }

    #[test]
    fn fast_switching_partition() {
        let m = DispersionMap::new(1.0, 1.0, 0.0005, 0.001).unwrap();
        let layers = sched(m).layer_partition(0.0, 0.002).unwrap();
        assert_eq!(layers.len(), 4);
        for (i, l) in layers.iter().enumerate() {
            assert!((l.length() - 0.0005).abs() < 1e-15);
            assert_eq!(l.gamma, if i % 2 == 0 { -1.0 } else { 1.0 });
        }
    }

    #[test]
    fn reversed_partition() {
        let m = DispersionMap::normalized().reversed(2.0).unwrap();
        let layers = sched(m).layer_partition(0.0, 2.0).unwrap();
        assert_eq!(layers.len(), 2);
        assert_eq!((layers[0].start, layers[0].end, layers[0].gamma), (0.0, 1.0, 1.0));
        assert_eq!((layers[1].start, layers[1].end, layers[1].gamma), (1.0, 2.0, -1.0));
        // left-continuous at the interfaces
        assert_eq!(m.gamma_at(1.0).unwrap(), 1.0);
        assert_eq!(m.gamma_at(2.0).unwrap(), -1.0);
    }

    #[test]
    fn rejects_invalid_maps() {
        assert!(DispersionMap::new(1.0, 1.0, 2.0, 2.0).is_err());
        assert!(DispersionMap::new(0.0, 1.0, 1.0, 2.0).is_err());
        assert!(DispersionMap::normalized().with_epsilon(0.0).is_err());
        let s = sched(DispersionMap::normalized());
        assert!(matches!(s.layer_partition(1.0, 1.0), Err(Error::EmptyWindow { .. })));
    }

    #[test]
    fn epsilon_scales_the_period() {
        let m = DispersionMap::normalized().with_epsilon(0.01).unwrap();
        assert_eq!(m.gamma_at(0.005).unwrap(), -1.0);
        assert_eq!(m.gamma_at(0.015).unwrap(), 1.0);
        assert_eq!(sched(m).layer_partition(0.0, 0.1).unwrap().len(), 10);
    }

    #[test]
    fn constant_schedule_is_one_layer() {
        let layers = GammaSchedule::focusing().layer_partition(0.0, 3.0).unwrap();
        assert_eq!(layers, vec![Layer { start: 0.0, end: 3.0, gamma: -1.0 }]);
    }

    #[test]
    fn config_record_shape() {
        let m = DispersionMap::normalized().reversed(2.0).unwrap();
        let json = serde_json::to_value(GammaSchedule::from(m)).unwrap();
        assert_eq!(json["t_star"], 1.0);
        assert_eq!(json["reversed_pivot"], 2.0);
        let back: GammaSchedule =
            serde_json::from_str(r#"{"gamma_minus":1,"gamma_plus":1,"t_star":1,"t_period":2}"#).unwrap();
        assert_eq!(back, GammaSchedule::Periodic(DispersionMap::normalized()));
        let c: GammaSchedule = serde_json::from_str(r#"{"constant":-1}"#).unwrap();
        assert_eq!(c, GammaSchedule::focusing());
    }

    fn arb_map() -> impl Strategy<Value = DispersionMap> {
        (0.1f64..3.0, 0.1f64..3.0, 0.05f64..0.95, 0.1f64..4.0, 0.05f64..2.0, any::<bool>(), 0.0f64..10.0)
            .prop_map(|(gm, gp, frac, t0, eps, rev, pivot)| {
                let m = DispersionMap {
                    gamma_minus: gm,
                    gamma_plus: gp,
                    t_star: frac * t0,
                    t_period: t0,
                    epsilon: eps,
                    reversed_pivot: None,
                };
                if rev {
                    m.reversed(pivot).unwrap()
                } else {
                    m
                }
            })
    }

    proptest! {
        #[test]
        fn values_are_two_sided(m in arb_map(), t in 1e-6f64..50.0) {
            let g = m.gamma_at(t).unwrap();
            prop_assert!(g == -m.gamma_minus || g == m.gamma_plus);
        }

        #[test]
        fn periodic_in_physical_time(m in arb_map(), t in 0.01f64..20.0) {
            let p = m.physical_period();
            // avoid samples within rounding distance of an interface
            let layers = sched(m).layer_partition(0.0, t + 2.0 * p).unwrap();
            let near = |s: f64| layers.iter().any(|l| (l.end - s).abs() < 1e-9 * (1.0 + s));
            prop_assume!(!near(t) && !near(t + p));
            prop_assert_eq!(m.gamma_at(t).unwrap(), m.gamma_at(t + p).unwrap());
        }

        #[test]
        fn partition_tiles_window(m in arb_map(), a in 0.0f64..5.0, len in 0.01f64..10.0) {
            let layers = sched(m).layer_partition(a, a + len).unwrap();
            prop_assert_eq!(layers[0].start, a);
            prop_assert_eq!(layers.last().unwrap().end, a + len);
            for w in layers.windows(2) {
                prop_assert_eq!(w[0].end, w[1].start);
                prop_assert!(w[0].gamma != w[1].gamma);
            }
            let total: f64 = layers.iter().map(|l| l.length()).sum();
            prop_assert!((total - len).abs() <= 1e-14 * (1.0 + a + len) * 8.0);
        }

        #[test]
        fn partition_agrees_with_point_values(m in arb_map(), seeds in proptest::collection::vec(0.0f64..1.0, 200)) {
            let layers = sched(m).layer_partition(0.0, 12.0).unwrap();
            for s in seeds {
                let t = 12.0 * s;
                prop_assume!(t > 0.0);
                let layer = layers.iter().find(|l| l.contains(t)).unwrap();
                let near = (layer.end - t).abs() < 1e-9 || (t - layer.start).abs() < 1e-9;
                if !near {
                    prop_assert_eq!(m.gamma_at(t).unwrap(), layer.gamma);
                }
            }
        }

        #[test]
        fn reversal_is_an_involution(m in arb_map(), pivot in 0.0f64..10.0, t in 0.0f64..20.0) {
            let forward = if m.is_reversed() { m.reversed(m.reversed_pivot.unwrap()).unwrap() } else { m };
            let twice = forward.reversed(pivot).unwrap().reversed(pivot).unwrap();
            prop_assert_eq!(twice, forward);
            prop_assert_eq!(twice.gamma_at(t).unwrap(), forward.gamma_at(t).unwrap());
        }
    }
}
