from mpmath import mp, mpf, quad, log, gamma, pi, inf, fabs, diff
mp.dps = 50
a = mpf('0.85')
c = 4**a*gamma(mpf(1)/2+a)/(pi**mpf('0.5')*fabs(gamma(-a)))
psi = lambda x: log(2+x*x)
def fl(x):
    x = mpf(x)
    eps = mpf('3e-3')
    d2 = diff(psi, x, 2); d4 = diff(psi, x, 4); d6 = diff(psi, x, 6)
    # symmetric second difference: -(2 d2 y^2/2 + 2 d4 y^4/24 + 2 d6 y^6/720)
    near = -(d2*eps**(2-2*a)/(2-2*a) + d4/12*eps**(4-2*a)/(4-2*a) + d6/360*eps**(6-2*a)/(6-2*a))
    g = lambda y: (2*psi(x)-psi(x+y)-psi(x-y))/y**(1+2*a)
    pts = [eps, mpf('0.5'), 1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 1e4, 1e5, 1e6, inf]
    if x > 0:
        pts += [x/2, x-1, x, x+1, 2*x]
    pts = sorted(set(p for p in pts if p >= eps))
    return c*(near + quad(g, pts))
for x in [0, 1, 10, 100]:
    v = fl(x)
    print(x, mp.nstr(v, 17), mp.nstr(fabs(v)/psi(mpf(x)), 17))
