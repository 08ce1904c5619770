/** The three-state channel color contract: green available+usable, red
 * unavailable or unusable, blue no status (unscanned / outside region). */

import type { ChannelStatus } from "./api.js";

export type StatusColor = "green" | "red" | "blue";

export function statusColor(status: ChannelStatus | undefined): StatusColor {
  switch (status) {
    case "available_usable":
      return "green";
    case "unavailable_or_unusable":
      return "red";
    default:
      return "blue";
  }
}
