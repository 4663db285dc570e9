/** AP profile view model: brightness slider probes and profile totals.
 *
 * The brightness slider maps to a one-second idle operating point at the
 * chosen duty; the displayed current is the server's prediction, verbatim.
 */

import { displayNumber } from "../format.js";
import { ApProfileSpec, ApSimResponse } from "../types.js";
import { FieldError, validateApProfile } from "../validators.js";

export const SLIDER_MIN = 0;
export const SLIDER_MAX = 98;

export function sliderProbeProfile(dutyPct: number): ApProfileSpec {
  return {
    name: `brightness-${dutyPct}`,
    horizon_s: 1.0,
    repeat: { mode: "once" },
    cycle: [
      {
        duration_s: 1.0,
        ap:
          dutyPct > 0
            ? { vlc: { mode: "idle", duty_pct: dutyPct }, usb: true, eth: true }
            : { usb: true, eth: true },
      },
    ],
  };
}

export interface ApTotalsDisplay {
  profile: string;
  energyJ: string;
  chargeC: string;
  avgCurrentMa: string;
}

export class ApProfileView {
  sliderDuty = 0;
  sliderCurrentMa = "—";
  profileName = "ap-validation";
  lastResponse: ApSimResponse | undefined;
  lastErrors: FieldError[] = [];

  setSlider(dutyPct: number): boolean {
    if (dutyPct < SLIDER_MIN || dutyPct > SLIDER_MAX) {
      this.lastErrors = [
        { field: "slider", message: `duty must be within ${SLIDER_MIN}-${SLIDER_MAX} %` },
      ];
      return false;
    }
    this.lastErrors = [];
    this.sliderDuty = dutyPct;
    return true;
  }

  sliderPayload(): ApProfileSpec {
    return sliderProbeProfile(this.sliderDuty);
  }

  applySliderResponse(response: ApSimResponse): string {
    this.sliderCurrentMa = displayNumber(response.avg_current_ma);
    return this.sliderCurrentMa;
  }

  validateProfile(profile: ApProfileSpec): FieldError[] {
    this.lastErrors = validateApProfile(profile).errors;
    return this.lastErrors;
  }

  applyProfileResponse(response: ApSimResponse): ApTotalsDisplay {
    this.lastResponse = response;
    return {
      profile: response.profile,
      energyJ: displayNumber(response.energy_j),
      chargeC: displayNumber(response.charge_c),
      avgCurrentMa: displayNumber(response.avg_current_ma),
    };
  }
}
