//! Central difference stencils on a node-major grid function.

use crate::error::{Error, Result};

/// Values at `(ix, iy)` stored at `iy * nx + ix`.
#[derive(Clone, Copy, Debug)]
pub struct GridFn<'a> {
    pub data: &'a [f64],
    pub nx: usize,
    pub ny: usize,
}

impl GridFn<'_> {
    fn at(&self, ix: usize, iy: usize) -> f64 {
        self.data[iy * self.nx + ix]
    }
}

/// Half-width of the stencil.
pub fn radius(order: u8) -> Result<usize> {
    match order {
        2 => Ok(1),
        4 => Ok(2),
        _ => Err(Error::InvalidParameter(format!(
            "stencil order must be 2 or 4, got {order}"
        ))),
    }
}

/// Offsets and weights of the first-derivative stencil (times `1/h`).
fn weights(order: u8) -> &'static [(isize, f64)] {
    match order {
        2 => &[(-1, -0.5), (1, 0.5)],
        _ => &[(-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0)],
    }
}

pub fn has_support(nx: usize, ny: usize, ix: usize, iy: usize, order: u8) -> bool {
    let Ok(r) = radius(order) else { return false };
    ix >= r && iy >= r && ix + r < nx && iy + r < ny
}

fn check(f: &GridFn, ix: usize, iy: usize, order: u8) -> Result<()> {
    radius(order)?;
    if has_support(f.nx, f.ny, ix, iy, order) {
        Ok(())
    } else {
        Err(Error::BoundaryNode { ix, iy, order })
    }
}

fn shift(i: usize, o: isize) -> usize {
    (i as isize + o) as usize
}

pub fn dx(f: &GridFn, ix: usize, iy: usize, h: f64, order: u8) -> Result<f64> {
    check(f, ix, iy, order)?;
    Ok(weights(order)
        .iter()
        .map(|&(o, w)| w * f.at(shift(ix, o), iy))
        .sum::<f64>()
        / h)
}

pub fn dy(f: &GridFn, ix: usize, iy: usize, h: f64, order: u8) -> Result<f64> {
    check(f, ix, iy, order)?;
    Ok(weights(order)
        .iter()
        .map(|&(o, w)| w * f.at(ix, shift(iy, o)))
        .sum::<f64>()
        / h)
}

/// `d2f/dxdy` as the tensor product of the first-derivative stencils.
pub fn mixed_derivative(f: &GridFn, ix: usize, iy: usize, hx: f64, hy: f64, order: u8) -> Result<f64> {
    check(f, ix, iy, order)?;
    let w = weights(order);
    let mut acc = 0.0;
    for &(oy, wy) in w {
        for &(ox, wx) in w {
            acc += wx * wy * f.at(shift(ix, ox), shift(iy, oy));
        }
    }
    Ok(acc / (hx * hy))
}
