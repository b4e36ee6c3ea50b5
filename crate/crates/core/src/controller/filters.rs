use std::f64::consts::PI;

/// First-order low-pass with unity DC gain, exact for a held input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrder {
    time_constant: f64,
    y: f64,
}

impl FirstOrder {
    pub fn new(time_constant: f64, initial: f64) -> Self {
        Self { time_constant, y: initial }
    }

    pub fn from_cutoff(cutoff_hz: f64, initial: f64) -> Self {
        Self::new(1.0 / (2.0 * PI * cutoff_hz), initial)
    }

    pub fn reset(&mut self, y: f64) {
        self.y = y;
    }

    pub fn step(&mut self, u: f64, dt: f64) -> f64 {
        let a = (-dt / self.time_constant).exp();
        self.y = a * self.y + (1.0 - a) * u;
        self.y
    }

    pub fn value(&self) -> f64 {
        self.y
    }
}

/// Second-order low-pass `ÿ = ω²(u − y) − 2ζω ẏ`. The state carries the
/// filtered value and its first derivative; the second derivative follows
/// from the input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrder {
    omega: f64,
    zeta: f64,
    y: f64,
    yd: f64,
}

impl SecondOrder {
    pub fn new(cutoff_hz: f64, zeta: f64, initial: f64) -> Self {
        Self {
            omega: 2.0 * PI * cutoff_hz,
            zeta,
            y: initial,
            yd: 0.0,
        }
    }

    pub fn critically_damped(cutoff_hz: f64, initial: f64) -> Self {
        Self::new(cutoff_hz, 1.0, initial)
    }

    pub fn reset(&mut self, y: f64) {
        self.y = y;
        self.yd = 0.0;
    }

    fn deriv(&self, u: f64, y: f64, yd: f64) -> (f64, f64) {
        (yd, self.omega * self.omega * (u - y) - 2.0 * self.zeta * self.omega * yd)
    }

    /// RK4 step with `u` held over `dt`.
    pub fn step(&mut self, u: f64, dt: f64) -> f64 {
        let (y, yd) = (self.y, self.yd);
        let k1 = self.deriv(u, y, yd);
        let k2 = self.deriv(u, y + 0.5 * dt * k1.0, yd + 0.5 * dt * k1.1);
        let k3 = self.deriv(u, y + 0.5 * dt * k2.0, yd + 0.5 * dt * k2.1);
        let k4 = self.deriv(u, y + dt * k3.0, yd + dt * k3.1);
        self.y += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        self.yd += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        self.y
    }

    pub fn value(&self) -> f64 {
        self.y
    }

    pub fn rate(&self) -> f64 {
        self.yd
    }

    pub fn accel(&self, u: f64) -> f64 {
        self.deriv(u, self.y, self.yd).1
    }
}

/// Fourth-order Butterworth low-pass as two cascaded second-order sections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourthOrder {
    first: SecondOrder,
    second: SecondOrder,
}

impl FourthOrder {
    pub fn butterworth(cutoff_hz: f64, initial: f64) -> Self {
        let z1 = (3.0 * PI / 8.0).cos();
        let z2 = (PI / 8.0).cos();
        Self {
            first: SecondOrder::new(cutoff_hz, z2, initial),
            second: SecondOrder::new(cutoff_hz, z1, initial),
        }
    }

    pub fn reset(&mut self, y: f64) {
        self.first.reset(y);
        self.second.reset(y);
    }

    pub fn step(&mut self, u: f64, dt: f64) -> f64 {
        let mid = self.first.value();
        self.first.step(u, dt);
        self.second.step(0.5 * (mid + self.first.value()), dt)
    }

    pub fn value(&self) -> f64 {
        self.second.value()
    }

    pub fn rate(&self) -> f64 {
        self.second.rate()
    }

    pub fn accel(&self) -> f64 {
        self.second.accel(self.first.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn unity_dc_gain() {
        let dt = 4e-3;
        let mut a = FirstOrder::new(0.5, 0.0);
        let mut b = SecondOrder::critically_damped(0.5, 0.0);
        let mut c = FourthOrder::butterworth(0.5, 0.0);
        for _ in 0..5000 {
            a.step(2.0, dt);
            b.step(2.0, dt);
            c.step(2.0, dt);
        }
        assert_abs_diff_eq!(a.value(), 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(b.value(), 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(c.value(), 2.0, epsilon = 1e-6);
        assert_abs_diff_eq!(c.rate(), 0.0, epsilon = 1e-6);
    }

    #[test]
    fn first_order_step_response() {
        let mut f = FirstOrder::new(0.5, 0.0);
        let mut t = 0.0;
        while t < 0.5 - 1e-12 {
            f.step(1.0, 1e-3);
            t += 1e-3;
        }
        assert_abs_diff_eq!(f.value(), 1.0 - (-1.0f64).exp(), epsilon = 1e-9);
    }

    #[test]
    fn critically_damped_step_matches_closed_form() {
        let fc = 0.5;
        let w = 2.0 * PI * fc;
        let mut f = SecondOrder::critically_damped(fc, 0.0);
        let dt = 1e-3;
        for _ in 0..1000 {
            f.step(1.0, dt);
        }
        let t = 1.0;
        let exact = 1.0 - (1.0 + w * t) * (-w * t).exp();
        let exact_rate = w * w * t * (-w * t).exp();
        assert_abs_diff_eq!(f.value(), exact, epsilon = 1e-9);
        assert_abs_diff_eq!(f.rate(), exact_rate, epsilon = 1e-9);
    }

    #[test]
    fn butterworth_has_no_large_overshoot_and_tracks_ramps() {
        let mut f = FourthOrder::butterworth(0.5, 0.0);
        let mut peak: f64 = 0.0;
        for _ in 0..20_000 {
            peak = peak.max(f.step(1.0, 1e-3));
        }
        // fourth-order Butterworth step overshoot is about 10.8 %
        assert!(peak > 1.05 && peak < 1.12, "peak {peak}");

        let mut g = SecondOrder::critically_damped(0.5, 0.0);
        let dt = 1e-3;
        for i in 0..20_000 {
            g.step(0.25 * i as f64 * dt, dt);
        }
        assert_abs_diff_eq!(g.rate(), 0.25, epsilon = 1e-6);
    }
}
