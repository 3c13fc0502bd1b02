//! ASCII rendering for debugging rollouts.

use super::EnvId;
use crate::state::LogicalState;

fn glyph(env: EnvId, slot: usize) -> char {
    let glyphs: &[char] = match env {
        EnvId::Getout => &['P', 'k', 'D', 'E'],
        EnvId::Loot => &['P', 'a', 'A', 'b', 'B'],
        EnvId::Threefish => &['P', 's', 'B'],
    };
    glyphs.get(slot).copied().unwrap_or('?')
}

/// Draws existing objects on a character grid, one cell per map unit, with
/// y growing upwards. Later roster slots are drawn under earlier ones.
pub fn render_ascii(env: EnvId, state: &LogicalState) -> String {
    let w = state.map.width.ceil() as usize + 1;
    let h = state.map.height.ceil() as usize + 1;
    let mut grid = vec![vec!['.'; w]; h];
    for (slot, o) in state.objects.iter().enumerate().rev() {
        if !o.exists {
            continue;
        }
        let col = (o.x.round() as usize).min(w - 1);
        let row = (o.y.round() as usize).min(h - 1);
        grid[h - 1 - row][col] = glyph(env, slot);
    }
    let mut out = String::with_capacity((w + 1) * h + 16);
    out.push_str(&format!("step {}\n", state.step_index));
    for row in grid {
        out.extend(row);
        out.push('\n');
    }
    out
}
