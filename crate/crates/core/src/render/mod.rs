//! Rasterizes states to the paired PNG images the benchmark ships, and
//! serializes maze and blocks states to text for the text-only ablation.
//!
//! Pixel geometry is fixed by the default theme; the golden tests pin the
//! exact bytes.

mod font;
mod text;

pub use text::{parse_blocks_text, parse_maze_text, text_serialize, TextFormatError};

use crate::env::{blocks::NUM_COLUMNS, BlocksState, Domain, EnvState, MazeState, ShuffleState};
use image::{Rgb, RgbImage};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("theme palette covers {palette} block colors but the layout has {blocks} blocks")]
    MissingColor { palette: usize, blocks: usize },
    #[error("images have mismatched heights: {left} vs {right}")]
    SizeMismatch { left: u32, right: u32 },
    #[error("rendering is not supported for the {0} domain")]
    Unsupported(Domain),
    #[error("failed to write image: {0}")]
    Io(#[from] image::ImageError),
}

/// Colors and geometry for the rasterizer. The block palette is indexed by
/// block id and doubles as the color-name source for scene graphs.
#[derive(Debug, Clone)]
pub struct RenderTheme {
    pub cell_px: u32,
    pub checker_light: Rgb<u8>,
    pub checker_dark: Rgb<u8>,
    pub start_color: Rgb<u8>,
    pub goal_color: Rgb<u8>,
    pub obstacle_color: Rgb<u8>,
    pub block_palette: Vec<Rgb<u8>>,
    pub numeral_color: Rgb<u8>,
    pub numeral_scale: u32,
    /// Shuffle source colors when no source image is supplied.
    pub tile_palette: Vec<Rgb<u8>>,
}

impl Default for RenderTheme {
    fn default() -> Self {
        RenderTheme {
            cell_px: 100,
            checker_light: Rgb([255, 255, 255]),
            checker_dark: Rgb([190, 190, 190]),
            start_color: Rgb([0, 170, 0]),
            goal_color: Rgb([0, 80, 220]),
            obstacle_color: Rgb([220, 30, 30]),
            // purple, orange, green, pink, light_pink, red, blue, yellow
            block_palette: vec![
                Rgb([128, 0, 180]),
                Rgb([255, 140, 0]),
                Rgb([0, 160, 60]),
                Rgb([255, 60, 160]),
                Rgb([255, 182, 203]),
                Rgb([210, 0, 0]),
                Rgb([30, 90, 230]),
                Rgb([240, 210, 0]),
            ],
            numeral_color: Rgb([0, 0, 0]),
            numeral_scale: 6,
            tile_palette: vec![
                Rgb([230, 60, 60]),
                Rgb([60, 160, 60]),
                Rgb([60, 90, 220]),
                Rgb([235, 190, 40]),
                Rgb([150, 60, 200]),
                Rgb([60, 200, 200]),
                Rgb([240, 130, 40]),
                Rgb([120, 80, 40]),
                Rgb([90, 90, 90]),
            ],
        }
    }
}

/// Rasterizes a state. Pure: the same state and theme produce bitwise
/// identical images.
pub fn render_state(state: &EnvState, theme: &RenderTheme) -> Result<RgbImage, RenderError> {
    match state {
        EnvState::Maze(s) => Ok(render_maze(s, theme)),
        EnvState::Blocks(s) => render_blocks(s, theme),
        EnvState::Shuffle(s) => Ok(render_shuffle(s, theme, None)),
        EnvState::Freetext(_) => Err(RenderError::Unsupported(Domain::Freetext)),
    }
}

/// Shuffle rendering with an optional source image; the source is resized by
/// tiling cells from it, falling back to the synthetic color pattern.
pub fn render_shuffle_with_source(
    state: &ShuffleState,
    theme: &RenderTheme,
    source: Option<&RgbImage>,
) -> RgbImage {
    render_shuffle(state, theme, source)
}

fn render_maze(state: &MazeState, theme: &RenderTheme) -> RgbImage {
    let cell = theme.cell_px;
    let (rows, cols) = (state.layout.rows as u32, state.layout.cols as u32);
    let mut img = RgbImage::new(cols * cell, rows * cell);
    for r in 0..rows {
        for c in 0..cols {
            let color =
                if (r + c) % 2 == 0 { theme.checker_light } else { theme.checker_dark };
            fill_rect(&mut img, c * cell, r * cell, cell, cell, color);
        }
    }
    for &(r, c) in &state.layout.obstacles {
        let margin = cell / 10;
        fill_rect(
            &mut img,
            c as u32 * cell + margin,
            r as u32 * cell + margin,
            cell - 2 * margin,
            cell - 2 * margin,
            theme.obstacle_color,
        );
    }
    draw_disc(&mut img, state.layout.goal, cell, theme.goal_color);
    draw_disc(&mut img, state.agent, cell, theme.start_color);
    img
}

fn render_blocks(state: &BlocksState, theme: &RenderTheme) -> Result<RgbImage, RenderError> {
    if theme.block_palette.len() < state.layout.num_blocks {
        return Err(RenderError::MissingColor {
            palette: theme.block_palette.len(),
            blocks: state.layout.num_blocks,
        });
    }
    let cell = theme.cell_px;
    // Fixed canvas height (tallest possible stack plus the label row) so all
    // states of an episode render at the same size.
    let rows = state.layout.num_blocks as u32 + 1;
    let mut img = RgbImage::new(NUM_COLUMNS as u32 * cell, rows * cell);
    fill_rect(&mut img, 0, 0, img.width(), img.height(), Rgb([255, 255, 255]));
    let label_row_y = (rows - 1) * cell;
    for col in 0..NUM_COLUMNS as u32 {
        // Column baseline and 0-4 label.
        fill_rect(&mut img, col * cell, label_row_y, cell, cell / 20, Rgb([0, 0, 0]));
        font::draw_number(
            &mut img,
            col,
            (col * cell + cell / 2) as i64,
            (label_row_y + cell / 2) as i64,
            theme.numeral_scale,
            Rgb([0, 0, 0]),
        );
    }
    for (col, stack) in state.columns.iter().enumerate() {
        for (level, &block) in stack.iter().enumerate() {
            let x = col as u32 * cell;
            let y = label_row_y - (level as u32 + 1) * cell;
            let margin = cell / 20;
            fill_rect(
                &mut img,
                x + margin,
                y + margin,
                cell - 2 * margin,
                cell - 2 * margin,
                theme.block_palette[block as usize],
            );
            font::draw_number(
                &mut img,
                block,
                (x + cell / 2) as i64,
                (y + cell / 2) as i64,
                theme.numeral_scale,
                theme.numeral_color,
            );
        }
    }
    Ok(img)
}

fn render_shuffle(state: &ShuffleState, theme: &RenderTheme, source: Option<&RgbImage>) -> RgbImage {
    let cell = theme.cell_px;
    let (rows, cols) = (state.tile_rows as u32, state.tile_cols as u32);
    let mut img = RgbImage::new(cols * cell, rows * cell);
    for idx in 0..state.tile_count() {
        let tile = state.perm[idx];
        let (r, c) = ((idx / state.tile_cols) as u32, (idx % state.tile_cols) as u32);
        let (tr, tc) = ((tile / state.tile_cols) as u32, (tile % state.tile_cols) as u32);
        for dy in 0..cell {
            for dx in 0..cell {
                let pixel = match source {
                    Some(src) => sample_tile(src, tr, tc, dx, dy, cell, rows, cols),
                    None => synthetic_tile_pixel(theme, tile, dx, dy, cell),
                };
                img.put_pixel(c * cell + dx, r * cell + dy, pixel);
            }
        }
    }
    img
}

/// Synthetic source pattern: a distinct solid color per tile with a darker
/// corner marker so orientation stays visible.
fn synthetic_tile_pixel(theme: &RenderTheme, tile: usize, dx: u32, dy: u32, cell: u32) -> Rgb<u8> {
    let base = theme.tile_palette[tile % theme.tile_palette.len()];
    if dx < cell / 4 && dy < cell / 4 {
        Rgb([base.0[0] / 2, base.0[1] / 2, base.0[2] / 2])
    } else {
        base
    }
}

fn sample_tile(
    src: &RgbImage,
    tile_r: u32,
    tile_c: u32,
    dx: u32,
    dy: u32,
    cell: u32,
    rows: u32,
    cols: u32,
) -> Rgb<u8> {
    let tile_w = src.width() / cols;
    let tile_h = src.height() / rows;
    let sx = tile_c * tile_w + dx * tile_w / cell;
    let sy = tile_r * tile_h + dy * tile_h / cell;
    *src.get_pixel(sx.min(src.width() - 1), sy.min(src.height() - 1))
}

/// Side-by-side composite with the initial state on the left.
pub fn compose_pair(initial: &RgbImage, goal: &RgbImage) -> Result<RgbImage, RenderError> {
    if initial.height() != goal.height() {
        return Err(RenderError::SizeMismatch { left: initial.height(), right: goal.height() });
    }
    let mut img = RgbImage::new(initial.width() + goal.width(), initial.height());
    for (x, y, p) in initial.enumerate_pixels() {
        img.put_pixel(x, y, *p);
    }
    for (x, y, p) in goal.enumerate_pixels() {
        img.put_pixel(initial.width() + x, y, *p);
    }
    Ok(img)
}

/// Deterministic PNG bytes for an image.
pub fn encode_png(img: &RgbImage) -> Result<Vec<u8>, RenderError> {
    let mut bytes = Vec::new();
    img.write_to(&mut std::io::Cursor::new(&mut bytes), image::ImageFormat::Png)?;
    Ok(bytes)
}

fn fill_rect(img: &mut RgbImage, x: u32, y: u32, w: u32, h: u32, color: Rgb<u8>) {
    for yy in y..(y + h).min(img.height()) {
        for xx in x..(x + w).min(img.width()) {
            img.put_pixel(xx, yy, color);
        }
    }
}

fn draw_disc(img: &mut RgbImage, cell_pos: (i32, i32), cell: u32, color: Rgb<u8>) {
    let r = (cell as i64) * 35 / 100;
    let cx = cell_pos.1 as i64 * cell as i64 + cell as i64 / 2;
    let cy = cell_pos.0 as i64 * cell as i64 + cell as i64 / 2;
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r * r {
                let (x, y) = (cx + dx, cy + dy);
                if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
                    img.put_pixel(x as u32, y as u32, color);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{BlocksLayout, MazeLayout};

    fn empty_maze() -> EnvState {
        let layout =
            MazeLayout::new(3, 3, std::collections::BTreeSet::new(), (0, 0), (2, 2)).unwrap();
        EnvState::Maze(MazeState::initial(layout))
    }

    fn count_pixels(img: &RgbImage, color: Rgb<u8>) -> usize {
        img.pixels().filter(|p| **p == color).count()
    }

    #[test]
    fn empty_maze_has_one_green_and_one_blue_disc() {
        let theme = RenderTheme::default();
        let img = render_state(&empty_maze(), &theme).unwrap();
        assert_eq!(img.width(), 3 * theme.cell_px);
        assert_eq!(img.height(), 3 * theme.cell_px);
        let disc_area = {
            let r = theme.cell_px as i64 * 35 / 100;
            (-r..=r)
                .flat_map(|dy| (-r..=r).map(move |dx| (dx, dy)))
                .filter(|(dx, dy)| dx * dx + dy * dy <= r * r)
                .count()
        };
        assert_eq!(count_pixels(&img, theme.start_color), disc_area);
        assert_eq!(count_pixels(&img, theme.goal_color), disc_area);
    }

    #[test]
    fn walkthrough_blocks_column_three_high() {
        let layout = BlocksLayout::new(8).unwrap();
        let columns = vec![vec![2], vec![0, 7], vec![1, 6, 5], vec![3], vec![4]];
        let state = EnvState::Blocks(BlocksState::new(layout, columns));
        let theme = RenderTheme::default();
        let img = render_state(&state, &theme).unwrap();
        assert_eq!(img.width(), 5 * theme.cell_px);
        // Column 2 (0-indexed) carries blocks 1, 6, 5: its color appears in
        // the third band above the label row.
        let label_y = img.height() - theme.cell_px;
        let probe_y = label_y - 2 * theme.cell_px - theme.cell_px / 2;
        let probe_x = 2 * theme.cell_px + theme.cell_px / 2;
        assert_eq!(*img.get_pixel(probe_x, probe_y), theme.block_palette[5]);
    }

    #[test]
    fn identity_perm_renders_source_tiles_bitwise() {
        let theme = RenderTheme::default();
        let identity = ShuffleState::identity(3, 3);
        let source = render_shuffle_with_source(&identity, &theme, None);
        let rendered = render_shuffle_with_source(&identity, &theme, Some(&source));
        assert_eq!(source.as_raw(), rendered.as_raw());
    }

    #[test]
    fn compose_pair_places_initial_left() {
        let theme = RenderTheme::default();
        let img = render_state(&empty_maze(), &theme).unwrap();
        let pair = compose_pair(&img, &img).unwrap();
        assert_eq!((pair.width(), pair.height()), (600, 300));
        for (x, y, p) in img.enumerate_pixels() {
            assert_eq!(pair.get_pixel(x, y), p);
            assert_eq!(pair.get_pixel(x + img.width(), y), p);
        }
    }

    #[test]
    fn compose_pair_rejects_mismatched_heights() {
        let a = RgbImage::new(10, 10);
        let b = RgbImage::new(10, 12);
        assert!(compose_pair(&a, &b).is_err());
    }

    #[test]
    fn rendering_is_pure() {
        let theme = RenderTheme::default();
        let a = encode_png(&render_state(&empty_maze(), &theme).unwrap()).unwrap();
        let b = encode_png(&render_state(&empty_maze(), &theme).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn small_palette_is_a_render_error() {
        let mut theme = RenderTheme::default();
        theme.block_palette.truncate(2);
        let layout = BlocksLayout::new(3).unwrap();
        let state = EnvState::Blocks(BlocksState::new(
            layout,
            vec![vec![0, 1, 2], vec![], vec![], vec![], vec![]],
        ));
        assert!(matches!(
            render_state(&state, &theme),
            Err(RenderError::MissingColor { .. })
        ));
    }
}
