"""
The six-term sequence and its certificate
=========================================

For an instance (K, P -> Q -> R, outer action) the sequence

    0 -> H1(R, Z(K)^P) -> H1(Q, Z(K)) -> H1(P, Z(K))^R
      -> H2(R, Z(K)^P) -> H2_P(Q, Z(K)) -> H1(R, H1(P, Z(K)))

is built, checked for exactness, and written as a JSON certificate that
can be replayed with cochain arithmetic alone.
"""

import copy
import json

from extlab.sixterm import build_sequence, dumps, get_instance, orders, replay_report, standard_instances

for name in sorted(standard_instances()):
    cert = build_sequence(get_instance(name))
    print(f"{name:13s} orders {orders(cert)} verdict {cert['verdict']['ok']}")

cert = build_sequence(get_instance("c2-klein"))
for m in cert["maps"]:
    print(f"{m['name']:6s} {m['source']} -> {m['target']}: {m['matrix']}")

# a round trip through JSON keeps the certificate valid
again = json.loads(dumps(cert))
print("replay failures:", replay_report(again))

# tampering with a map is caught
bad = copy.deepcopy(again)
bad["maps"][1]["matrix"][2] = 0
print("tampered replay failures:", replay_report(bad)[:2])
