//! The dyadic pairing bijection `<k, m> = 2^(k-1) (2m - 1)` between pairs of
//! positive integers and positive integers.

use crate::DiagopError;

/// Encodes `(k, m)` with `k, m ≥ 1` as `2^(k-1) (2m - 1)`.
pub fn pair_encode(k: u64, m: u64) -> Result<u64, DiagopError> {
    if k == 0 || m == 0 {
        return Err(DiagopError::ParamRange(format!(
            "pair components must be >= 1, got ({k}, {m})"
        )));
    }
    let odd = m
        .checked_mul(2)
        .and_then(|x| x.checked_sub(1))
        .ok_or(DiagopError::PairOverflow { k, m })?;
    if k - 1 >= 64 {
        return Err(DiagopError::PairOverflow { k, m });
    }
    odd.checked_shl((k - 1) as u32)
        .filter(|v| v >> (k - 1) == odd)
        .ok_or(DiagopError::PairOverflow { k, m })
}

/// Decodes `n ≥ 1` into the unique `(k, m)` with `pair_encode(k, m) = n`.
pub fn pair_decode(n: u64) -> (u64, u64) {
    debug_assert!(n >= 1);
    let tz = n.trailing_zeros() as u64;
    let odd = n >> tz;
    (tz + 1, (odd + 1) / 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_examples() {
        assert_eq!(pair_encode(1, 1).unwrap(), 1);
        assert_eq!(pair_encode(2, 2).unwrap(), 6); // 2^1 * 3
        assert_eq!(pair_encode(3, 1).unwrap(), 4); // 2^2 * 1
    }

    #[test]
    fn decode_examples() {
        assert_eq!(pair_decode(1), (1, 1));
        assert_eq!(pair_decode(6), (2, 2));
        assert_eq!(pair_decode(12), (3, 2)); // 12 = 2^2 * 3
    }

    #[test]
    fn mutually_inverse_on_first_million() {
        for n in 1..=1_000_000u64 {
            let (k, m) = pair_decode(n);
            assert_eq!(pair_encode(k, m).unwrap(), n);
        }
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(
            pair_encode(70, 1),
            Err(DiagopError::PairOverflow { .. })
        ));
        assert!(matches!(
            pair_encode(64, u64::MAX / 2),
            Err(DiagopError::PairOverflow { .. })
        ));
        assert!(pair_encode(0, 1).is_err());
    }
}
