//! Small fixed-size vector and quaternion math over a generic scalar.
//!
//! The robot is eight boxes and sixteen three-link legs; a hand-rolled
//! `Vec3`/`UnitQuat` keeps every floating-point operation explicit, which the
//! byte-stable determinism contract depends on.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use crate::real::{lit, Real};

/// 3-component vector.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    #[inline]
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    /// Unit vector, or zero when the norm underflows.
    #[inline]
    pub fn normalized(self) -> Self {
        let n = self.norm();
        if n > T::zero() {
            self / n
        } else {
            Self::zero()
        }
    }

    /// Component-wise product.
    #[inline]
    pub fn scale(self, o: Self) -> Self {
        Self::new(self.x * o.x, self.y * o.y, self.z * o.z)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> SubAssign for Vec3<T> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl<T: Real> Div<T> for Vec3<T> {
    type Output = Self;
    #[inline]
    fn div(self, s: T) -> Self {
        Self::new(self.x / s, self.y / s, self.z / s)
    }
}

/// Unit quaternion representing a rotation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitQuat<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> UnitQuat<T> {
    #[inline]
    pub fn identity() -> Self {
        Self {
            w: T::one(),
            x: T::zero(),
            y: T::zero(),
            z: T::zero(),
        }
    }

    /// Exponential map: rotation by `|v|` radians about `v`.
    pub fn from_scaled_axis(v: Vec3<T>) -> Self {
        let angle2 = v.norm_squared();
        let half = lit::<T>(0.5);
        if angle2 < lit(1e-24) {
            // sin(θ/2)/θ ≈ 1/2 − θ²/48 for small θ
            let k = half - angle2 / lit(48.0);
            Self {
                w: T::one() - angle2 / lit(8.0),
                x: v.x * k,
                y: v.y * k,
                z: v.z * k,
            }
            .renormalized()
        } else {
            let angle = angle2.sqrt();
            let (s, c) = (angle * half).sin_cos();
            let k = s / angle;
            Self {
                w: c,
                x: v.x * k,
                y: v.y * k,
                z: v.z * k,
            }
        }
    }

    /// Rotation about the world z axis.
    pub fn from_yaw(yaw: T) -> Self {
        Self::from_scaled_axis(Vec3::new(T::zero(), T::zero(), yaw))
    }

    /// Logarithmic map: the scaled-axis vector of the shortest arc.
    pub fn to_scaled_axis(self) -> Vec3<T> {
        // q and -q encode the same rotation; pick the w >= 0 representative.
        let q = if self.w < T::zero() {
            Self {
                w: -self.w,
                x: -self.x,
                y: -self.y,
                z: -self.z,
            }
        } else {
            self
        };
        let v = Vec3::new(q.x, q.y, q.z);
        let n = v.norm();
        if n < lit(1e-12) {
            v * lit(2.0)
        } else {
            let angle = lit::<T>(2.0) * n.atan2(q.w);
            v * (angle / n)
        }
    }

    #[inline]
    pub fn conjugate(self) -> Self {
        Self {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// Hamilton product.
    pub fn mul_quat(self, o: Self) -> Self {
        Self {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }

    /// Rotates a vector: `q v q*`.
    pub fn rotate(self, v: Vec3<T>) -> Vec3<T> {
        let u = Vec3::new(self.x, self.y, self.z);
        let t = u.cross(v) * lit(2.0);
        v + t * self.w + u.cross(t)
    }

    /// Inverse rotation without building the conjugate.
    #[inline]
    pub fn rotate_inv(self, v: Vec3<T>) -> Vec3<T> {
        self.conjugate().rotate(v)
    }

    pub fn renormalized(self) -> Self {
        let n = (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt();
        Self {
            w: self.w / n,
            x: self.x / n,
            y: self.y / n,
            z: self.z / n,
        }
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}
