/**
 * Force-to-audio mapping. Pure and fixed:
 *
 *   gain: log scale, -60 dB at 1e-13 N rising to -6 dB at 1e-8 N, clamped
 *   to [-80, -6]; forces below the audibility floor (or exactly zero) mute
 *   entirely. The interaction force spans roughly five decades between
 *   far-field and snap, so a linear map would be inaudible until contact.
 *
 *   timbre: attraction (negative force) plays a smooth sine, repulsion a
 *   brighter square, so the sign is audible before the magnitude is.
 */

export const GAIN_DB_FLOOR = -80;
export const GAIN_DB_MAX = -6;
export const REF_QUIET_N = 1e-13; // -60 dB
export const REF_LOUD_N = 1e-8; // -6 dB
export const MUTE_BELOW_N = 1e-15;

export type Timbre = "sine" | "square";

export interface AudioParams {
  gainDb: number; // -Infinity means muted
  timbre: Timbre;
  /** oscillator pitch; rises with the interaction stiffness */
  freqHz: number;
}

const DB_PER_DECADE = (GAIN_DB_MAX - -60) / Math.log10(REF_LOUD_N / REF_QUIET_N);

export const BASE_FREQ_HZ = 180;
export const MAX_FREQ_HZ = 720;
// stiffness proxies map onto pitch between these two scales (N/m)
const GRAD_QUIET = 1e-4;
const GRAD_STEEP = 1e2;

/**
 * Pure audio mapping. |force| sets the gain (see module docstring), the
 * force sign sets the timbre, and the optional stiffness proxy (e.g. a
 * finite difference of surface force over tip motion) raises the pitch as
 * the tip approaches the instability, where the gradient blows up.
 */
export function sonify(force: number, gradientProxy = 0): AudioParams {
  const mag = Math.abs(force);
  const timbre: Timbre = force < 0 ? "sine" : "square";
  const g = Math.abs(gradientProxy);
  let freqHz = BASE_FREQ_HZ;
  if (g > GRAD_QUIET) {
    const frac = Math.min(1, Math.log10(g / GRAD_QUIET) / Math.log10(GRAD_STEEP / GRAD_QUIET));
    freqHz = BASE_FREQ_HZ + frac * (MAX_FREQ_HZ - BASE_FREQ_HZ);
  }
  if (mag < MUTE_BELOW_N) {
    return { gainDb: -Infinity, timbre, freqHz };
  }
  const db = -60 + DB_PER_DECADE * Math.log10(mag / REF_QUIET_N);
  return { gainDb: Math.min(GAIN_DB_MAX, Math.max(GAIN_DB_FLOOR, db)), timbre, freqHz };
}

export function gainDbToLinear(db: number): number {
  return db === -Infinity ? 0 : Math.pow(10, db / 20);
}
