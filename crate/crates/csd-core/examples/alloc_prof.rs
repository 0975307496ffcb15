use csd_core::scalar::Scalar;
use num_bigint::BigInt;
use std::time::Instant;

fn main() {
    let n = 51_200u64;
    let t = Instant::now();
    let mut acc = 0usize;
    for i in 0..n {
        let a = Scalar::new(
            BigInt::from(123456789012345678i128 + i as i128),
            BigInt::from(987654321098765432i128),
        );
        acc += a.numer().bits() as usize;
    }
    println!("Scalar::new (gcd) x{}: {:?} -> {}", n, t.elapsed(), acc % 7);

    let t = Instant::now();
    let mut acc = 0usize;
    for i in 0..n {
        let a = Scalar::from_bigint(BigInt::from(123456789012345678i128 + i as i128));
        acc += a.numer().bits() as usize;
    }
    println!("Scalar::from_bigint x{}: {:?} -> {}", n, t.elapsed(), acc % 7);

    let x = Scalar::ratio(355, 113);
    let y = Scalar::ratio(-217, 93);
    let t = Instant::now();
    let mut acc = Scalar::zero();
    for _ in 0..n {
        acc = &acc + &(&x * &y);
    }
    println!("rational mul+add x{}: {:?} -> {}", n, t.elapsed(), acc.is_positive());
}
