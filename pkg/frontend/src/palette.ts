/** Screen palettes.
 *
 * The default palette uses two clearly separated greens for the user's
 * action arrow versus the suggested one. The alternate palette swaps these
 * for the blue and orange of the Okabe-Ito set so the pair stays
 * distinguishable under the common forms of color vision deficiency; the
 * suggested arrow is additionally drawn dashed in both palettes so the
 * distinction never rests on hue alone.
 */

export interface Palette {
  name: string;
  background: string;
  frame: string;
  text: string;
  banner: string;
  marker: string;
  velocity: string;
  drag: string;
  userAction: string;
  optimalAction: string;
  trail: string;
  arm: string;
  progress: string;
  error: string;
}

export const GREEN_PALETTE: Palette = {
  name: "greens",
  background: "#101418",
  frame: "#3c4652",
  text: "#d8dee6",
  banner: "#9fb2c8",
  marker: "#e8c14b",
  velocity: "#6aa3d8",
  drag: "#e8e8e8",
  userAction: "#1b7837",
  optimalAction: "#8fd694",
  trail: "#5a6572",
  arm: "#8a97a6",
  progress: "#4f8fd0",
  error: "#e06666",
};

export const SAFE_PALETTE: Palette = {
  ...GREEN_PALETTE,
  name: "color-safe",
  userAction: "#0072b2",
  optimalAction: "#e69f00",
};

export function togglePalette(p: Palette): Palette {
  return p.name === GREEN_PALETTE.name ? SAFE_PALETTE : GREEN_PALETTE;
}
