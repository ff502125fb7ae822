"""
Inter-UAV distance from two GPS fixes
=====================================

The detector never looks at a fix on its own. It turns two fixes into a
distance and checks that against the UWB radios. This script walks through
that conversion.
"""

from swarmguard.geodesy import (
    GeoCoordinate,
    LocalFrame,
    altitude_adjusted_distance,
    geodetic_to_local,
    local_to_geodetic,
    spherical_distance,
)

# A tangent-plane frame lets us place UAVs in metres.
origin = GeoCoordinate(52.0, 14.0, 0.0)
frame = LocalFrame(origin)
uav1 = local_to_geodetic(frame, 0.0, 0.0, 50.0)
uav2 = local_to_geodetic(frame, 100.0, 0.0, 100.0)
print("UAV 2 fix:", uav2)

# Great-circle distance ignores altitude ...
flat = spherical_distance(uav1, uav2)
print(f"great-circle distance: {flat:.4f} m")

# ... so the altitude difference is added back as the second leg of a
# right triangle: sqrt(100^2 + 50^2).
d_gps = altitude_adjusted_distance(flat, uav1.altitude_m, uav2.altitude_m)
print(f"altitude-adjusted distance: {d_gps:.4f} m")

# Near-coincident fixes matter for the identical-signal attack, where two
# victims report almost the same coordinate. The evaluation stays stable
# down to centimetres.
for sep in (1.0, 0.1, 0.01):
    b = local_to_geodetic(frame, sep, 0.0, 0.0)
    print(f"{sep:5.2f} m apart -> {spherical_distance(origin, b):.6f} m")

# geodetic_to_local maps fixes back into the frame.
print("back in the frame:", geodetic_to_local(frame, uav2))
