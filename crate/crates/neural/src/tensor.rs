use std::fmt::Debug;

use num_traits::Float;

/// Float type the model can run in: `f32` for training and serving, `f64`
/// for finite-difference checks.
pub trait Scalar: Float + Debug + Default + Send + Sync + 'static {
    fn of(x: f64) -> Self {
        Self::from(x).expect("representable constant")
    }
    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("finite float")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Row-major matrix. Vectors are single rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<F = f32> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<F>,
}

impl<F: Scalar> Tensor<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Tensor { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<F>) -> Self {
        assert_eq!(data.len(), rows * cols, "tensor data length");
        Tensor { rows, cols, data }
    }

    pub fn row_vector(data: Vec<F>) -> Self {
        Tensor { rows: 1, cols: data.len(), data }
    }

    pub fn shape(&self) -> [usize; 2] {
        [self.rows, self.cols]
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [F] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn at(&self, r: usize, c: usize) -> F {
        self.data[r * self.cols + c]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn cast<G: Scalar>(&self) -> Tensor<G> {
        Tensor {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| G::of(x.as_f64())).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Tensor<F>) {
        debug_assert_eq!(self.shape(), other.shape());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + *b;
        }
    }

    pub fn sq_norm(&self) -> F {
        self.data.iter().fold(F::zero(), |s, x| s + *x * *x)
    }
}

/// `out += a · b`.
pub fn matmul_acc<F: Scalar>(a: &Tensor<F>, b: &Tensor<F>, out: &mut Tensor<F>) {
    assert_eq!(a.cols, b.rows, "matmul inner dimension");
    assert_eq!(out.shape(), [a.rows, b.cols], "matmul output shape");
    for i in 0..a.rows {
        let o = &mut out.data[i * b.cols..(i + 1) * b.cols];
        for (k, &x) in a.row(i).iter().enumerate() {
            if x == F::zero() {
                continue;
            }
            for (y, &w) in o.iter_mut().zip(b.row(k)) {
                *y = *y + x * w;
            }
        }
    }
}

/// `out += a · bᵀ`.
pub fn matmul_t_acc<F: Scalar>(a: &Tensor<F>, b: &Tensor<F>, out: &mut Tensor<F>) {
    assert_eq!(a.cols, b.cols, "matmul_t inner dimension");
    assert_eq!(out.shape(), [a.rows, b.rows], "matmul_t output shape");
    for i in 0..a.rows {
        let ar = a.row(i);
        for j in 0..b.rows {
            let dot = ar.iter().zip(b.row(j)).fold(F::zero(), |s, (x, y)| s + *x * *y);
            let o = &mut out.data[i * b.rows + j];
            *o = *o + dot;
        }
    }
}

/// `out += aᵀ · b`.
pub fn t_matmul_acc<F: Scalar>(a: &Tensor<F>, b: &Tensor<F>, out: &mut Tensor<F>) {
    assert_eq!(a.rows, b.rows, "t_matmul inner dimension");
    assert_eq!(out.shape(), [a.cols, b.cols], "t_matmul output shape");
    for k in 0..a.rows {
        let br = b.row(k);
        for (i, &x) in a.row(k).iter().enumerate() {
            if x == F::zero() {
                continue;
            }
            let o = &mut out.data[i * b.cols..(i + 1) * b.cols];
            for (y, &w) in o.iter_mut().zip(br) {
                *y = *y + x * w;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_variants_agree() {
        let a = Tensor::from_vec(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let b = Tensor::from_vec(3, 2, vec![1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let mut c = Tensor::<f64>::zeros(2, 2);
        matmul_acc(&a, &b, &mut c);
        assert_eq!(c.data, vec![4.0, 5.0, 10.0, 11.0]);
        let bt = Tensor::from_vec(2, 3, vec![1.0, 0.0, 1.0, 0.0, 1.0, 1.0]);
        let mut d = Tensor::zeros(2, 2);
        matmul_t_acc(&a, &bt, &mut d);
        assert_eq!(c, d);
        let mut e = Tensor::zeros(3, 3);
        t_matmul_acc(&a, &a, &mut e);
        assert_eq!(e.at(0, 0), 17.0);
        assert_eq!(e.at(2, 1), 3.0 * 2.0 + 6.0 * 5.0);
    }
}
