//! Dirichlet characters mod N with exact root-of-unity values, the square
//! root convention for ζ, and Kronecker symbols.
//!
//! The unit group (ℤ/N)^* is presented on a fixed generator basis so that
//! character files are portable: odd prime powers use the smallest
//! primitive root, the modulus 4 uses the class of −1, and 2^a for a ≥ 3
//! uses the pair −1, 5 in that order. Components are listed by increasing
//! prime. A character is the list of exponents against that basis, and all
//! of its values are [`ExactPhase`]s — rational turns, never floats.

use num_integer::Integer;

use crate::phase::ExactPhase;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CharacterError {
    #[error("expected {expected} exponents for modulus {modulus}, got {got}")]
    WrongExponentCount {
        modulus: u64,
        expected: usize,
        got: usize,
    },
    #[error("modulus must be positive and at most {max}", max = MAX_MODULUS)]
    UnsupportedModulus,
    #[error("phase of order {order} is not an {r}-th root of unity")]
    NotAnRthRoot { order: u64, r: u64 },
}

/// Largest modulus for which discrete-log tables are built eagerly.
pub const MAX_MODULUS: u64 = 1_000_000;

/// One canonical generator of a prime-power component, together with its
/// discrete-log table (index by the residue mod the prime power; non-units
/// hold `u32::MAX`).
#[derive(Clone, Debug)]
struct Generator {
    prime_power: u64,
    order: u64,
    dlog: Vec<u32>,
}

const NO_DLOG: u32 = u32::MAX;

/// A Dirichlet character mod N, stored as exponents against the canonical
/// generator basis of (ℤ/N)^*.
#[derive(Clone, Debug)]
pub struct DirichletCharacter {
    modulus: u64,
    generators: Vec<Generator>,
    exponents: Vec<u64>,
    order: u64,
}

/// Orders of the canonical generators of (ℤ/N)^*, in canonical order.
pub fn canonical_generator_orders(modulus: u64) -> Result<Vec<u64>, CharacterError> {
    Ok(build_generators(modulus)?
        .iter()
        .map(|g| g.order)
        .collect())
}

fn build_generators(modulus: u64) -> Result<Vec<Generator>, CharacterError> {
    if modulus == 0 || modulus > MAX_MODULUS {
        return Err(CharacterError::UnsupportedModulus);
    }
    let mut gens = Vec::new();
    let mut n = modulus;
    let two_part = {
        let mut a = 0u32;
        while n.is_multiple_of(2) {
            n /= 2;
            a += 1;
        }
        a
    };
    match two_part {
        0 | 1 => {}
        2 => gens.push(minus_one_generator(4)),
        a => {
            let pp = 1u64 << a;
            gens.push(minus_one_generator(pp));
            gens.push(five_generator(pp));
        }
    }
    let mut p = 3u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut pp = 1;
            while n.is_multiple_of(p) {
                n /= p;
                pp *= p;
            }
            gens.push(odd_prime_power_generator(p, pp));
        }
        p += 2;
    }
    if n > 1 {
        gens.push(odd_prime_power_generator(n, n));
    }
    Ok(gens)
}

fn minus_one_generator(pp: u64) -> Generator {
    // dlog of n mod pp with respect to −1 alone is defined on {1, pp−1}
    // (modulus 4) or records the ±-component for 2^a, a ≥ 3, where every
    // unit is (−1)^s 5^t and s = 0 exactly when n ≡ 1 (mod 4).
    let mut dlog = vec![NO_DLOG; pp as usize];
    for n in (1..pp).step_by(2) {
        dlog[n as usize] = if n % 4 == 1 { 0 } else { 1 };
    }
    Generator {
        prime_power: pp,
        order: 2,
        dlog,
    }
}

fn five_generator(pp: u64) -> Generator {
    let order = pp / 4;
    let mut dlog = vec![NO_DLOG; pp as usize];
    let mut v = 1u64;
    for t in 0..order {
        dlog[v as usize] = t as u32;
        dlog[(pp - v) as usize] = t as u32; // −5^t has the same 5-component
        v = v * 5 % pp;
    }
    Generator {
        prime_power: pp,
        order,
        dlog,
    }
}

fn odd_prime_power_generator(p: u64, pp: u64) -> Generator {
    let order = pp / p * (p - 1);
    let g = smallest_primitive_root(p, pp, order);
    let mut dlog = vec![NO_DLOG; pp as usize];
    let mut v = 1u64;
    for t in 0..order {
        dlog[v as usize] = t as u32;
        v = mul_mod(v, g, pp);
    }
    Generator {
        prime_power: pp,
        order,
        dlog,
    }
}

fn smallest_primitive_root(p: u64, pp: u64, group_order: u64) -> u64 {
    let factors = distinct_prime_factors(group_order);
    'candidate: for g in 2..pp {
        if g % p == 0 {
            continue;
        }
        for &q in &factors {
            if pow_mod(g, group_order / q, pp) == 1 {
                continue 'candidate;
            }
        }
        return g;
    }
    unreachable!("(Z/p^a)^* is cyclic for odd p, a primitive root exists");
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Build a character from its exponent list against the canonical basis.
pub fn character_from_exponents(
    modulus: u64,
    exponents: &[i64],
) -> Result<DirichletCharacter, CharacterError> {
    let generators = build_generators(modulus)?;
    if exponents.len() != generators.len() {
        return Err(CharacterError::WrongExponentCount {
            modulus,
            expected: generators.len(),
            got: exponents.len(),
        });
    }
    let exponents: Vec<u64> = generators
        .iter()
        .zip(exponents)
        .map(|(g, &e)| e.rem_euclid(g.order as i64) as u64)
        .collect();
    let order = generators
        .iter()
        .zip(&exponents)
        .map(|(g, &e)| g.order / g.order.gcd(&e))
        .fold(1u64, |acc, o| acc.lcm(&o));
    Ok(DirichletCharacter {
        modulus,
        generators,
        exponents,
        order,
    })
}

impl DirichletCharacter {
    /// The trivial (principal) character mod N.
    pub fn trivial(modulus: u64) -> DirichletCharacter {
        let generators = build_generators(modulus).expect("modulus in range");
        let exponents = vec![0; generators.len()];
        DirichletCharacter {
            modulus,
            generators,
            exponents,
            order: 1,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The order r_ε of the character.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// χ(n): `None` exactly when gcd(n, N) > 1, otherwise the exact phase.
    pub fn evaluate(&self, n: i64) -> Option<ExactPhase> {
        let n = n.rem_euclid(self.modulus as i64) as u64;
        if self.modulus > 1 && n.gcd(&self.modulus) != 1 {
            return None;
        }
        // Accumulate Σ e_i·x_i/d_i over the common denominator of the
        // generator orders, exactly.
        let common: u64 = self
            .generators
            .iter()
            .fold(1u64, |acc, g| acc.lcm(&g.order));
        let mut num: i128 = 0;
        for (g, &e) in self.generators.iter().zip(&self.exponents) {
            let x = g.dlog[(n % g.prime_power) as usize];
            debug_assert!(x != NO_DLOG);
            num += e as i128 * x as i128 * (common / g.order) as i128;
            num %= common as i128;
        }
        Some(ExactPhase::new(num as i64, common as i64))
    }

    /// The image of the character: the full cyclic group of r_ε-th roots of
    /// unity, listed as phases j/r_ε for j = 0, …, r_ε − 1.
    pub fn image(&self) -> Vec<ExactPhase> {
        (0..self.order as i64)
            .map(|j| ExactPhase::new(j, self.order as i64))
            .collect()
    }

    /// The character χ^e (exponents multiplied through).
    pub fn pow(&self, e: u64) -> DirichletCharacter {
        let exps: Vec<i64> = self
            .generators
            .iter()
            .zip(&self.exponents)
            .map(|(g, &x)| ((x as u128 * e as u128) % g.order as u128) as i64)
            .collect();
        character_from_exponents(self.modulus, &exps).expect("same basis")
    }

    /// Pointwise equality on residues coprime to both moduli. Used to check
    /// lift-character compatibility where the moduli need not agree.
    pub fn agrees_on_units_with(&self, other: &DirichletCharacter) -> bool {
        let l = self.modulus.lcm(&other.modulus).max(1);
        (1..=l)
            .filter(|n| n.gcd(&l) == 1)
            .all(|n| self.evaluate(n as i64) == other.evaluate(n as i64))
    }
}

/// The square root ζ of an r_ε-th root of unity ξ: for odd r_ε the
/// unique square root inside the group of r_ε-th roots of unity
/// (ξ^{(r_ε+1)/2}), and for even r_ε the choice ζ = e^{πi·m/r_ε} where m
/// is the canonical exponent of ξ in 1..=r_ε.
#[allow(clippy::manual_div_ceil)] // (r + 1) / 2 is the square-root exponent, keep it legible
pub fn sqrt_convention(xi: &ExactPhase, r: u64) -> Result<ExactPhase, CharacterError> {
    let m = xi
        .canonical_exponent(r)
        .ok_or(CharacterError::NotAnRthRoot {
            order: xi.order(),
            r,
        })?;
    if r % 2 == 1 {
        Ok(xi.pow(((r + 1) / 2) as i64))
    } else {
        Ok(ExactPhase::new(m as i64, 2 * r as i64))
    }
}

/// Kronecker symbol (a|n) with the standard conventions: (a|2) is 0 for
/// even a and ±1 by a mod 8 otherwise; (a|−1) = sign of a; completely
/// multiplicative in n.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    while n % 2 == 0 {
        n /= 2;
        match a.rem_euclid(8) {
            1 | 7 => {}
            3 | 5 => result = -result,
            _ => return 0, // even a
        }
    }
    // Jacobi symbol (a|n) for odd n > 0.
    let mut a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::SignClass;

    #[test]
    fn trivial_character_mod_one() {
        let chi = character_from_exponents(1, &[]).unwrap();
        assert_eq!(chi.order(), 1);
        assert_eq!(chi.evaluate(7), Some(ExactPhase::ONE));
        assert_eq!(chi.evaluate(0), Some(ExactPhase::ONE));
    }

    #[test]
    fn nontrivial_character_mod_four() {
        let chi = character_from_exponents(4, &[1]).unwrap();
        assert_eq!(chi.order(), 2);
        assert_eq!(chi.evaluate(3), Some(ExactPhase::MINUS_ONE));
        assert_eq!(chi.evaluate(1), Some(ExactPhase::ONE));
        assert_eq!(chi.evaluate(2), None);
        assert_eq!(
            chi.image(),
            vec![ExactPhase::ONE, ExactPhase::MINUS_ONE]
        );
    }

    #[test]
    fn order_four_character_mod_five() {
        // 2 is the smallest primitive root mod 5; exponent 1 sends it to i.
        let chi = character_from_exponents(5, &[1]).unwrap();
        assert_eq!(chi.order(), 4);
        assert_eq!(chi.evaluate(2), Some(ExactPhase::I));
        assert_eq!(
            chi.image(),
            vec![
                ExactPhase::ONE,
                ExactPhase::I,
                ExactPhase::MINUS_ONE,
                ExactPhase::new(3, 4)
            ]
        );
    }

    #[test]
    fn exponent_count_is_checked() {
        assert!(matches!(
            character_from_exponents(4, &[1, 0]),
            Err(CharacterError::WrongExponentCount { .. })
        ));
        assert!(character_from_exponents(8, &[1, 1]).is_ok());
    }

    #[test]
    fn complete_multiplicativity_small_moduli() {
        // Every modulus up to 200, two exponent patterns each, all residue
        // pairs.
        for modulus in 1u64..=200 {
            let orders = canonical_generator_orders(modulus).unwrap();
            // walk a couple of exponent patterns per modulus
            let patterns: Vec<Vec<i64>> = vec![
                orders.iter().map(|_| 1i64).collect(),
                orders
                    .iter()
                    .enumerate()
                    .map(|(i, &o)| (i as i64 + 1) % o as i64)
                    .collect(),
            ];
            for exps in patterns {
                let chi = character_from_exponents(modulus, &exps).unwrap();
                for m in 1..=modulus.max(2) {
                    for n in 1..=modulus.max(2) {
                        let lhs = chi.evaluate((m * n) as i64);
                        let rhs = match (chi.evaluate(m as i64), chi.evaluate(n as i64)) {
                            (Some(a), Some(b)) => Some(a.mul(&b)),
                            _ => None,
                        };
                        assert_eq!(lhs, rhs, "modulus {modulus} m {m} n {n}");
                    }
                }
            }
        }
    }

    #[test]
    fn order_matches_brute_force() {
        for modulus in [3u64, 5, 7, 8, 9, 15, 16, 32, 35] {
            let orders = canonical_generator_orders(modulus).unwrap();
            for first in 0..orders[0] {
                let mut exps = vec![0i64; orders.len()];
                exps[0] = first as i64;
                if orders.len() > 1 {
                    exps[1] = 1;
                }
                let chi = character_from_exponents(modulus, &exps).unwrap();
                // brute force: least r >= 1 with chi(n)^r = 1 for all units
                let mut r = 1u64;
                'search: loop {
                    let ok = (1..modulus).filter(|n| n.gcd(&modulus) == 1).all(|n| {
                        chi.evaluate(n as i64)
                            .map(|p| p.pow(r as i64) == ExactPhase::ONE)
                            .unwrap_or(true)
                    });
                    if ok {
                        break 'search;
                    }
                    r += 1;
                }
                assert_eq!(chi.order(), r, "modulus {modulus} exps {exps:?}");
            }
        }
    }

    #[test]
    fn image_is_attained_and_closed() {
        for (modulus, exps) in [(5u64, vec![1i64]), (16, vec![1, 1]), (7, vec![2])] {
            let chi = character_from_exponents(modulus, &exps).unwrap();
            let image = chi.image();
            assert_eq!(image.len() as u64, chi.order());
            // every value attained is in the image, and every image element
            // is attained by some unit
            let mut attained: Vec<ExactPhase> = (1..modulus)
                .filter_map(|n| chi.evaluate(n as i64))
                .collect();
            attained.sort();
            attained.dedup();
            let mut expected = image.clone();
            expected.sort();
            assert_eq!(attained, expected);
            for a in &image {
                for b in &image {
                    assert!(image.contains(&a.mul(b)));
                }
            }
        }
    }

    #[test]
    fn sqrt_convention_examples() {
        // even order: ξ = −1, r = 2 → ζ = i
        assert_eq!(
            sqrt_convention(&ExactPhase::MINUS_ONE, 2).unwrap(),
            ExactPhase::I
        );
        // even order: ξ = 1, r = 2 → canonical exponent 2 → ζ = e^{πi} = −1
        assert_eq!(
            sqrt_convention(&ExactPhase::ONE, 2).unwrap(),
            ExactPhase::MINUS_ONE
        );
        // odd order: unique square root inside the image group
        assert_eq!(
            sqrt_convention(&ExactPhase::new(1, 3), 3).unwrap(),
            ExactPhase::new(2, 3)
        );
        // odd order, trivial image: ζ = 1
        assert_eq!(
            sqrt_convention(&ExactPhase::ONE, 1).unwrap(),
            ExactPhase::ONE
        );
        assert!(sqrt_convention(&ExactPhase::new(1, 3), 4).is_err());
    }

    #[test]
    fn sqrt_convention_squares_back() {
        for r in 1..=24u64 {
            for j in 0..r {
                let xi = ExactPhase::new(j as i64, r as i64);
                let zeta = sqrt_convention(&xi, r).unwrap();
                assert_eq!(zeta.mul(&zeta), xi, "r {r} j {j}");
                if r % 2 == 1 {
                    // odd order: the root lies in the image group
                    assert!(r % zeta.order() == 0);
                }
            }
        }
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(16, 2), 0);
        assert_eq!(kronecker(-4, 7), -1);
        assert_eq!(kronecker(16, 3), 1);
        assert_eq!(kronecker(5, 1), 1);
        assert_eq!(kronecker(1, 0), 1);
        assert_eq!(kronecker(2, 0), 0);
        assert_eq!(kronecker(-1, -1), -1);
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        let primes = crate::primes::primes_up_to(500);
        for &p in primes.iter().filter(|&&p| p > 2) {
            for a in -100i64..=100 {
                let euler = pow_mod(a.rem_euclid(p as i64) as u64, (p - 1) / 2, p);
                let expected = if euler == 0 {
                    0
                } else if euler == 1 {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker(a, p as i64), expected, "a {a} p {p}");
            }
        }
    }

    #[test]
    fn kronecker_multiplicative_in_n() {
        for a in [-7i64, -4, -1, 2, 5, 12, 16] {
            for m in 1..40i64 {
                for n in 1..40i64 {
                    assert_eq!(
                        kronecker(a, m * n),
                        kronecker(a, m) * kronecker(a, n),
                        "a {a} m {m} n {n}"
                    );
                }
            }
        }
    }

    #[test]
    fn quadratic_character_mod_16_matches_minus_four_symbol() {
        // the conductor-4 character seen mod 16: exponent 1 on −1, 0 on 5
        let chi = character_from_exponents(16, &[1, 0]).unwrap();
        assert_eq!(chi.order(), 2);
        for n in (1..100i64).step_by(2) {
            let k = kronecker(-4, n);
            let v = chi.evaluate(n).unwrap();
            let expected = if k == 1 {
                ExactPhase::ONE
            } else {
                ExactPhase::MINUS_ONE
            };
            assert_eq!(v, expected, "n {n}");
        }
        assert_eq!(chi.evaluate(1).unwrap().re_sign(), SignClass::Pos);
    }
}
