//! Tiny built-in 3x5 bitmap digits for block numerals and column labels.

/// Row-major 3x5 bitmaps, most significant bit left. Row `r` of digit `d` is
/// `DIGITS[d][r]`, using the low three bits.
const DIGITS: [[u8; 5]; 10] = [
    [0b111, 0b101, 0b101, 0b101, 0b111], // 0
    [0b010, 0b110, 0b010, 0b010, 0b111], // 1
    [0b111, 0b001, 0b111, 0b100, 0b111], // 2
    [0b111, 0b001, 0b111, 0b001, 0b111], // 3
    [0b101, 0b101, 0b111, 0b001, 0b001], // 4
    [0b111, 0b100, 0b111, 0b001, 0b111], // 5
    [0b111, 0b100, 0b111, 0b101, 0b111], // 6
    [0b111, 0b001, 0b010, 0b010, 0b010], // 7
    [0b111, 0b101, 0b111, 0b101, 0b111], // 8
    [0b111, 0b101, 0b111, 0b001, 0b111], // 9
];

pub const GLYPH_COLS: u32 = 3;
pub const GLYPH_ROWS: u32 = 5;

/// Draws `digit` with its glyph center at `(cx, cy)`, each font pixel
/// rendered as a `scale`-sized square.
pub fn draw_digit(
    img: &mut image::RgbImage,
    digit: u8,
    cx: i64,
    cy: i64,
    scale: u32,
    color: image::Rgb<u8>,
) {
    let glyph = DIGITS[(digit % 10) as usize];
    let w = (GLYPH_COLS * scale) as i64;
    let h = (GLYPH_ROWS * scale) as i64;
    let x0 = cx - w / 2;
    let y0 = cy - h / 2;
    for (row, bits) in glyph.iter().enumerate() {
        for col in 0..GLYPH_COLS {
            if bits >> (GLYPH_COLS - 1 - col) & 1 == 1 {
                for dy in 0..scale as i64 {
                    for dx in 0..scale as i64 {
                        let x = x0 + col as i64 * scale as i64 + dx;
                        let y = y0 + row as i64 * scale as i64 + dy;
                        if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height()
                        {
                            img.put_pixel(x as u32, y as u32, color);
                        }
                    }
                }
            }
        }
    }
}

/// Draws a (possibly multi-digit) number centered at `(cx, cy)`.
pub fn draw_number(
    img: &mut image::RgbImage,
    value: u32,
    cx: i64,
    cy: i64,
    scale: u32,
    color: image::Rgb<u8>,
) {
    let digits: Vec<u8> = value
        .to_string()
        .bytes()
        .map(|b| b - b'0')
        .collect();
    let advance = ((GLYPH_COLS + 1) * scale) as i64;
    let total = advance * digits.len() as i64 - scale as i64;
    let mut x = cx - total / 2 + (GLYPH_COLS * scale) as i64 / 2;
    for d in digits {
        draw_digit(img, d, x, cy, scale, color);
        x += advance;
    }
}
