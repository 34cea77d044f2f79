//! Prefix products of matrix sequences.
//!
//! Products are associative, so a blocked parallel scan gives the same exact
//! result as left-to-right multiplication.

use rayon::prelude::*;

/// `out[i] = items[0] * items[1] * ... * items[i]`.
pub fn prefix_products<T, F>(items: &[T], mul: F) -> Vec<T>
where
    T: Clone,
    F: Fn(&T, &T) -> T,
{
    let mut out: Vec<T> = Vec::with_capacity(items.len());
    for item in items {
        let next = match out.last() {
            Some(acc) => mul(acc, item),
            None => item.clone(),
        };
        out.push(next);
    }
    out
}

/// Blocked parallel version of [`prefix_products`].
pub fn prefix_products_par<T, F>(items: &[T], mul: F) -> Vec<T>
where
    T: Clone + Send + Sync,
    F: Fn(&T, &T) -> T + Sync,
{
    let n = items.len();
    if n < 4 {
        return prefix_products(items, mul);
    }
    let threads = rayon::current_num_threads().max(2);
    let block = n.div_ceil(threads).max(2);

    let local: Vec<Vec<T>> = items
        .par_chunks(block)
        .map(|chunk| prefix_products(chunk, &mul))
        .collect();

    // Carry-in for each block: product of all preceding blocks.
    let mut carries: Vec<Option<T>> = Vec::with_capacity(local.len());
    let mut running: Option<T> = None;
    for block in &local {
        carries.push(running.clone());
        let total = block.last().expect("non-empty block");
        running = Some(match &running {
            Some(acc) => mul(acc, total),
            None => total.clone(),
        });
    }

    local
        .into_par_iter()
        .zip(carries.into_par_iter())
        .flat_map_iter(|(block, carry)| {
            let mapped: Vec<T> = match carry {
                Some(c) => block.iter().map(|x| mul(&c, x)).collect(),
                None => block,
            };
            mapped.into_iter()
        })
        .collect()
}

/// Product of all items, combined as a balanced parallel reduction.
pub fn product_par<T, F>(items: &[T], identity: T, mul: F) -> T
where
    T: Clone + Send + Sync,
    F: Fn(&T, &T) -> T + Sync,
{
    if items.is_empty() {
        return identity;
    }
    reduce(items, &mul)
}

fn reduce<T, F>(items: &[T], mul: &F) -> T
where
    T: Clone + Send + Sync,
    F: Fn(&T, &T) -> T + Sync,
{
    if items.len() == 1 {
        return items[0].clone();
    }
    let (left, right) = items.split_at(items.len() / 2);
    let (a, b) = rayon::join(|| reduce(left, mul), || reduce(right, mul));
    mul(&a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;

    // String concatenation is associative but not commutative, which catches
    // any reordering.
    fn cat(a: &String, b: &String) -> String {
        format!("{a}{b}")
    }

    #[test]
    fn parallel_scan_matches_sequential_on_noncommutative_op() {
        for n in [0usize, 1, 3, 4, 7, 31, 100] {
            let items: Vec<String> = (0..n).map(|i| format!("<{i}>")).collect();
            assert_eq!(prefix_products(&items, cat), prefix_products_par(&items, cat));
            let full = prefix_products(&items, cat).last().cloned().unwrap_or_default();
            assert_eq!(product_par(&items, String::new(), cat), full);
        }
    }
}
