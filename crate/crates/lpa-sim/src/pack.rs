use lp_arith::Mode;
use lp_core::LPBitPattern;

/// Packs one weight tile into its buffer image. `tile[r][j]` is the
/// encoded weight for array row r (reduction index) and logical column j;
/// each byte holds `w` weights for one PE, slot 0 in the highest bits
/// (MODE-B: slot 0 = high nibble, slot 1 = low nibble). Missing logical
/// columns pack as the zero pattern. Bytes are row-major over
/// (row, physical column).
pub fn pack_weights(tile: &[Vec<LPBitPattern>], mode: Mode) -> Vec<u8> {
    let w = mode.weights_per_pe();
    let bits = mode.weight_bits() as usize;
    let rows = tile.len();
    let logical = if rows == 0 { 0 } else { tile[0].len() };
    let phys = logical.div_ceil(w);
    let mut image = Vec::with_capacity(rows * phys);
    for row in tile {
        for c in 0..phys {
            let mut byte = 0u8;
            for s in 0..w {
                let j = c * w + s;
                let pattern = if j < logical { row[j].bits() } else { 0 };
                byte |= pattern << (8 - bits * (s + 1));
            }
            image.push(byte);
        }
    }
    image
}

/// Splits one PE container byte back into its `w` weight patterns, slot
/// order (slot 0 from the highest bits).
pub fn unpack_container(byte: u8, mode: Mode) -> Vec<LPBitPattern> {
    let w = mode.weights_per_pe();
    let bits = mode.weight_bits() as usize;
    let mask = if bits == 8 { 0xFF } else { (1u8 << bits) - 1 };
    (0..w)
        .map(|s| {
            let shift = 8 - bits * (s + 1);
            LPBitPattern::new((byte >> shift) & mask, mode.weight_bits())
        })
        .collect()
}
