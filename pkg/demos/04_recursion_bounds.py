"""Numeric certification of the two difference inequalities behind the
convergence analysis.

The first recursion, phi_{k+1} = (1 - tau_k) phi_k + beta_k with
tau_k ~ k^{-t1} and beta_k ~ k^{-t2}, decays like k^{-(t2 - t1)}.  The
second, phi_{k+1} = phi_k max{eta, 1 - phi_k^mu} + gamma_k, tracks
gamma_k^{1/(1+mu)}.  Both are run to a long horizon and the claimed
tail bound is checked with a constant fitted on an early window only.
"""

from cgal import analysis

print("phi_{k+1} = (1 - k^{-t1}) phi_k + k^{-t2}   ->   phi_k = O(k^{-(t2-t1)})")
for t1, t2 in ((0.5, 1.0), (0.3, 1.5), (0.7, 0.9)):
    spec = analysis.SequenceSpec(kind="prop21", t1=t1, t2=t2, horizon=1_000_000)
    cert = analysis.simulate_prop21(spec)
    print(f"  t1={t1}, t2={t2}: C = {cert.constant:8.4f}, "
          f"tail residual = {cert.residual:.2e}  "
          f"({'certified' if cert.certified else 'NOT certified'})")

print()
print("phi_{k+1} = phi_k max{eta, 1 - phi_k^mu} + (k+1)^{-s}"
      "   ->   phi_k = O((k+1)^{-s/(1+mu)})")
for eta, mu, s in ((0.75, 1.0, 2.0), (0.5, 0.5, 3.0), (0.9, 1.0, 1.0)):
    spec = analysis.SequenceSpec(kind="prop22", eta=eta, mu=mu, s=s, horizon=1_000_000)
    cert = analysis.simulate_prop22(spec)
    print(f"  eta={eta}, mu={mu}, s={s}: C = {cert.constant:8.4f}, "
          f"tail residual = {cert.residual:.2e}  "
          f"({'certified' if cert.certified else 'NOT certified'})")
