/// Standard posit decoder, used as an independent oracle for LP.
///
/// Classic scheme: sign, run-length regime bounded only by the word size,
/// es exponent bits (MSB-first, missing bits read as zero), and a *linear*
/// fraction 1.f. value = (-1)^s * 2^(2^es * k) * 2^e * (1 + f/2^fb).
/// All-zeros is 0, 1·0^(n-1) is NaR (returned as NaN), negatives decode
/// via two's complement.
///
/// Deliberately self-contained: shares no code with the LP field decoder.
pub fn standard_posit_decode(bits: u8, n: u8, es: u8) -> f64 {
    assert!((2..=8).contains(&n), "n = {n} outside [2, 8]");
    let mask = if n == 8 { 0xFFu8 } else { (1u8 << n) - 1 };
    let word = bits & mask;
    if word == 0 {
        return 0.0;
    }
    if word == 1 << (n - 1) {
        return f64::NAN;
    }
    let (mag, sign) = if word >> (n - 1) == 1 {
        (word.wrapping_neg() & mask, -1.0)
    } else {
        (word, 1.0)
    };

    let body_len = n - 1;
    let bit_at = |i: u8| -> u8 { (mag >> (body_len - 1 - i)) & 1 };

    let first = bit_at(0);
    let mut run = 1u8;
    while run < body_len && bit_at(run) == first {
        run += 1;
    }
    let (regime_width, k) = if run == body_len {
        (run, if first == 1 { run as i32 - 1 } else { -(run as i32) })
    } else {
        (
            run + 1,
            if first == 1 { run as i32 - 1 } else { -(run as i32) },
        )
    };

    let mut pos = regime_width;
    let exp_bits = es.min(body_len - pos);
    let mut e = 0u32;
    for i in 0..exp_bits {
        e |= u32::from(bit_at(pos + i)) << (es - 1 - i);
    }
    pos += exp_bits;

    let frac_bits = body_len - pos;
    let mut f = 0u32;
    for i in 0..frac_bits {
        f |= u32::from(bit_at(pos + i)) << (frac_bits - 1 - i);
    }
    let frac = 1.0 + f64::from(f) / f64::from(1u32 << frac_bits);

    let scale = f64::from(k * (1i32 << es) + e as i32);
    sign * scale.exp2() * frac
}
