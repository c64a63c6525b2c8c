"""Frozen 50-digit reference values produced by ``oracle_gen.py``."""

I0_1 = 1.26606587775200833559824462521
K0_1 = 0.421024438240708333335627379213
K1_1 = 0.601907230197234574737540001536
K2_10 = 0.000021509817006932768730664564424
K0_2 = 0.113893872749533435652719574932
K0_2_OVER_K0_1 = 0.270516061313329193003921823442
K40_100_OVER_K40_50 = 9.29647634247121491177112866017e-26
K3_1P7 = 1.17831572987198440713020874145
I5_0P3 = 6.35189364278031624337320132762e-07
K10_0P5 = 188937569319.900259644624178168

# Cylinder sums and integrals from tests/physics_oracle.py (mpmath, unfolded
# two-sided sums over |j| <= 60, graded Gauss-Legendre panels).
XI_A1_R2 = (-0.21675521655669209884, -0.053880226923728246455, -0.098592827121763589041)
U0_A1_R2 = -0.42874896118846047128
SZ_A1_D1_KC10 = 0.0013629102347554578803
SPHI_A1_D1_N10 = 0.028076074785660606721
# (R_rho_rho, R_phi_phi, R_zz, R_rho_z) at a=1, rho0=1.5, k_c=6
RZ_A1_R1P5_KC6 = (-7.1346328720919148947, -1.7171477440230208119, 1.1862253621804528232, -7.6845871780173034297)
# (R_rho_rho, R_phi_phi, R_zz, R_rho_phi) at a=1, rho0=1.5, N=6
RPHI_A1_R1P5_N6 = (-8.1817604220824454581, 0.14755552771404584059, -3.113793628570204255, -6.9776073017788128894)
