//! Nonnegative integer vectors.

pub type VectorN = Vec<u64>;

pub fn zeros(d: usize) -> VectorN {
    vec![0; d]
}

pub fn unit(d: usize, i: usize) -> VectorN {
    let mut v = zeros(d);
    v[i] = 1;
    v
}

/// Componentwise sum. Panics on length mismatch, which callers rule out.
pub fn add(a: &[u64], b: &[u64]) -> VectorN {
    assert_eq!(a.len(), b.len(), "vector dimensions differ");
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn add_assign(a: &mut [u64], b: &[u64]) {
    assert_eq!(a.len(), b.len(), "vector dimensions differ");
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

pub fn scale(a: &[u64], k: u64) -> VectorN {
    a.iter().map(|x| x * k).collect()
}

pub fn concat(a: &[u64], b: &[u64]) -> VectorN {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    out.extend_from_slice(b);
    out
}

pub fn is_zero(a: &[u64]) -> bool {
    a.iter().all(|&x| x == 0)
}

pub fn render(a: &[u64]) -> String {
    let parts: Vec<String> = a.iter().map(u64::to_string).collect();
    format!("({})", parts.join(","))
}
