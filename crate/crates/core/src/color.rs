//! sRGB <-> CIELAB (D65, 2 degree observer) and its polar form.

use crate::math;

/// 8-bit sRGB triple.
pub type Srgb = [u8; 3];

const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];

const XYZ_TO_RGB: [[f64; 3]; 3] = [
    [3.2404542, -1.5371385, -0.4985314],
    [-0.9692660, 1.8760108, 0.0415560],
    [0.0556434, -0.2040259, 1.0572252],
];

// D65 white as the image of linear RGB (1, 1, 1), so greys have a = b = 0.
const WHITE: [f64; 3] = [
    RGB_TO_XYZ[0][0] + RGB_TO_XYZ[0][1] + RGB_TO_XYZ[0][2],
    RGB_TO_XYZ[1][0] + RGB_TO_XYZ[1][1] + RGB_TO_XYZ[1][2],
    RGB_TO_XYZ[2][0] + RGB_TO_XYZ[2][1] + RGB_TO_XYZ[2][2],
];

const EPSILON: f64 = 216.0 / 24389.0;
const KAPPA: f64 = 24389.0 / 27.0;

/// Tolerance on linear RGB when deciding whether a color is in gamut.
pub const GAMUT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Lab {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

/// CIE LCh(ab): lightness, chroma, hue in degrees `[0, 360)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Lch {
    pub l: f64,
    pub c: f64,
    pub h: f64,
}

impl Lab {
    pub const fn new(l: f64, a: f64, b: f64) -> Self {
        Self { l, a, b }
    }

    pub fn to_lch(self) -> Lch {
        let c = math::hypot(self.a, self.b);
        let h = if c == 0.0 {
            0.0
        } else {
            math::rem_euclid(math::to_degrees(math::atan2(self.b, self.a)), 360.0)
        };
        Lch { l: self.l, c, h }
    }
}

impl Lch {
    pub fn to_lab(self) -> Lab {
        let h = math::to_radians(self.h);
        Lab::new(self.l, self.c * math::cos(h), self.c * math::sin(h))
    }
}

#[inline]
pub fn decode_channel(v: f64) -> f64 {
    if v <= 0.04045 {
        v / 12.92
    } else {
        math::powf((v + 0.055) / 1.055, 2.4)
    }
}

#[inline]
pub fn encode_channel(v: f64) -> f64 {
    if v <= 0.0031308 {
        12.92 * v
    } else {
        1.055 * math::powf(v, 1.0 / 2.4) - 0.055
    }
}

#[inline]
fn lab_f(t: f64) -> f64 {
    if t > EPSILON {
        math::cbrt(t)
    } else {
        (KAPPA * t + 16.0) / 116.0
    }
}

#[inline]
fn lab_f_inv(f: f64) -> f64 {
    let f3 = f * f * f;
    if f3 > EPSILON {
        f3
    } else {
        (116.0 * f - 16.0) / KAPPA
    }
}

fn mul(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// Lab of a linear-light RGB triple.
pub fn lab_from_linear(rgb: [f64; 3]) -> Lab {
    let xyz = mul(&RGB_TO_XYZ, rgb);
    let fx = lab_f(xyz[0] / WHITE[0]);
    let fy = lab_f(xyz[1] / WHITE[1]);
    let fz = lab_f(xyz[2] / WHITE[2]);
    Lab::new(116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))
}

/// Linear-light RGB of `lab`, unclamped (may fall outside `[0, 1]`).
pub fn linear_from_lab(lab: Lab) -> [f64; 3] {
    let fy = (lab.l + 16.0) / 116.0;
    let fx = fy + lab.a / 500.0;
    let fz = fy - lab.b / 200.0;
    let xyz = [
        lab_f_inv(fx) * WHITE[0],
        lab_f_inv(fy) * WHITE[1],
        lab_f_inv(fz) * WHITE[2],
    ];
    mul(&XYZ_TO_RGB, xyz)
}

pub fn linear_from_srgb(c: Srgb) -> [f64; 3] {
    [
        decode_channel(c[0] as f64 / 255.0),
        decode_channel(c[1] as f64 / 255.0),
        decode_channel(c[2] as f64 / 255.0),
    ]
}

pub fn lab_from_srgb(c: Srgb) -> Lab {
    lab_from_linear(linear_from_srgb(c))
}

pub fn in_gamut(linear: [f64; 3]) -> bool {
    linear
        .iter()
        .all(|&v| (-GAMUT_TOLERANCE..=1.0 + GAMUT_TOLERANCE).contains(&v))
}

/// Clamps each linear channel to `[0, 1]` and quantizes to 8-bit sRGB.
pub fn quantize_linear(linear: [f64; 3]) -> Srgb {
    let q = |v: f64| -> u8 {
        let e = encode_channel(v.clamp(0.0, 1.0));
        math::round_half_up(e * 255.0).clamp(0.0, 255.0) as u8
    };
    [q(linear[0]), q(linear[1]), q(linear[2])]
}

/// 8-bit sRGB of `lab` and whether any channel had to be clamped.
pub fn srgb_from_lab(lab: Lab) -> (Srgb, bool) {
    let linear = linear_from_lab(lab);
    (quantize_linear(linear), !in_gamut(linear))
}

/// Largest chroma `<= lch.c` that is displayable at the same L and hue.
pub fn gamut_limited(lch: Lch) -> Lch {
    if in_gamut(linear_from_lab(lch.to_lab())) {
        return lch;
    }
    let (mut lo, mut hi) = (0.0, lch.c);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        let probe = Lch { c: mid, ..lch };
        if in_gamut(linear_from_lab(probe.to_lab())) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Lch { c: lo, ..lch }
}
