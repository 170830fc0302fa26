use crate::geometry::Pose2;
use crate::math;
use crate::state::WorldState;

/// Bin sizes used to identify search states.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Resolution {
    pub position: f64,
    pub yaw: f64,
    pub drawer: f64,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution { position: 0.5, yaw: 0.05, drawer: 0.5 }
    }
}

impl Resolution {
    pub fn is_valid(&self) -> bool {
        [self.position, self.yaw, self.drawer].iter().all(|v| v.is_finite() && *v > 0.0)
    }
}

/// Discretized state identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateKey {
    gripper: [i64; 3],
    held: Option<(u8, i64)>,
    rods: [[i64; 3]; 2],
    drawer: i64,
}

impl StateKey {
    /// Stable 64-bit hash (FNV-1a over the bins).
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |v: i64| {
            for b in v.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        self.gripper.iter().for_each(|&v| feed(v));
        match self.held {
            Some((i, o)) => {
                feed(1 + i as i64);
                feed(o);
            }
            None => feed(0),
        }
        self.rods.iter().flatten().for_each(|&v| feed(v));
        feed(self.drawer);
        h
    }
}

fn bin(v: f64, step: f64) -> i64 {
    math::round(v / step) as i64
}

/// Yaw bins are clamped to `±floor(π / step)`.
fn yaw_bin(yaw: f64, step: f64) -> i64 {
    let limit = math::floor(math::PI / step) as i64;
    bin(yaw, step).clamp(-limit, limit)
}

fn pose_bins(p: &Pose2, res: &Resolution) -> [i64; 3] {
    [bin(p.x, res.position), bin(p.y, res.position), yaw_bin(p.yaw, res.yaw)]
}

/// Discretized identity of `s`. Search nodes keep the continuous state of the
/// first visit to each key.
pub fn state_key(s: &WorldState, res: &Resolution) -> StateKey {
    StateKey {
        gripper: pose_bins(&s.gripper, res),
        held: s.held.map(|h| (h.rod_index as u8, bin(h.grasp_offset, res.position))),
        rods: [pose_bins(&s.rods[0], res), pose_bins(&s.rods[1], res)],
        drawer: bin(s.drawer_open, res.drawer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Scene;
    use alloc::sync::Arc;

    fn state(x: f64) -> WorldState {
        WorldState::new(
            Arc::new(Scene::default()),
            [Pose2::new(x, 30.0, 0.3).unwrap(), Pose2::new(10.0, 10.0, 0.0).unwrap()],
        )
    }

    #[test]
    fn same_bin_same_key() {
        let res = Resolution::default();
        let a = state_key(&state(20.1), &res);
        let b = state_key(&state(19.9), &res);
        assert_eq!(a, b);
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c = state_key(&state(20.4), &res);
        assert_ne!(a, c);
        assert_ne!(a.fingerprint(), c.fingerprint());
    }

    #[test]
    fn yaw_bins_are_clamped() {
        let res = Resolution::default();
        let mut s = state(20.0);
        s.rods[0] = Pose2::new(20.0, 30.0, math::PI).unwrap();
        let k = state_key(&s, &res);
        s.rods[0] = Pose2::new(20.0, 30.0, 3.1).unwrap();
        assert_eq!(state_key(&s, &res), k);
    }

    #[test]
    fn held_offset_is_part_of_the_key() {
        let res = Resolution::default();
        let mut s = state(20.0);
        s.held = Some(crate::state::Held { rod_index: 0, grasp_offset: 7.25 });
        let a = state_key(&s, &res);
        s.held = Some(crate::state::Held { rod_index: 0, grasp_offset: 0.0 });
        assert_ne!(a, state_key(&s, &res));
    }
}
