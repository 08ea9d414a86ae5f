use crate::petri::Trace;

/// Unit-cost edit distance over arbitrary symbols, two-row DP.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let substitution = prev[j] + usize::from(x != y);
            curr[j + 1] = substitution.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// Edit distance divided by the longer length; two empty traces are at 0.
pub fn normalized_levenshtein(t1: &Trace, t2: &Trace) -> f64 {
    let longest = t1.len().max(t2.len());
    if longest == 0 {
        return 0.0;
    }
    levenshtein(&t1.0, &t2.0) as f64 / longest as f64
}
