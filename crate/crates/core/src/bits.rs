//! Bit-vector byte forms.
//!
//! Bits pack most-significant-first into bytes; the final byte is zero-padded.

/// Packs bits MSB-first without a length prefix.
pub fn pack_bits_raw(bits: &[bool]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            out[i / 8] |= 0x80 >> (i % 8);
        }
    }
    out
}

/// Inverse of [`pack_bits_raw`] for a known bit count.
pub fn unpack_bits_raw(bytes: &[u8], count: usize) -> Option<Vec<bool>> {
    if bytes.len() != count.div_ceil(8) {
        return None;
    }
    let bits: Vec<bool> = (0..count).map(|i| bytes[i / 8] & (0x80 >> (i % 8)) != 0).collect();
    // Padding must be zero so that each bit vector has exactly one encoding.
    let padded_ok = (count..bytes.len() * 8).all(|i| bytes[i / 8] & (0x80 >> (i % 8)) == 0);
    padded_ok.then_some(bits)
}

/// 4-byte big-endian bit count followed by the packed bits.
pub fn pack_bits(bits: &[bool]) -> Vec<u8> {
    let count = u32::try_from(bits.len()).expect("bit vector longer than u32::MAX");
    let mut out = count.to_be_bytes().to_vec();
    out.extend(pack_bits_raw(bits));
    out
}

pub fn unpack_bits(bytes: &[u8]) -> Option<Vec<bool>> {
    let (head, body) = bytes.split_first_chunk::<4>()?;
    unpack_bits_raw(body, u32::from_be_bytes(*head) as usize)
}
