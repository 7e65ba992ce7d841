# scenarios/library.py

"""
Domínios de referência em baixa dimensão.

- wedge_domain: X_a(t) = {x₂ >= 0, x₂ <= |x₁| − t}, duas peças (ramos de |x₁|)
- parabola_domain: X_b(t) = {x₂ >= 0, x₂ <= x₁² − t}
- domínios auxiliares para testes e convergência
"""

from domain.constraints import AffineConstraint, QuadraticConstraint
from domain.models import BasicSet, PiecewiseDomain


def wedge_domain() -> PiecewiseDomain:
    """Peça 0: ramo x₁ >= 0; peça 1: ramo x₁ <= 0"""
    right = BasicSet(
        inequalities=(
            AffineConstraint(a=[-1.0, 0.0], name='x1>=0'),
            AffineConstraint(a=[0.0, -1.0], name='x2>=0'),
            AffineConstraint(a=[-1.0, 1.0], c=1.0, name='x2<=x1-t'),
        ),
        name='direita',
    )
    left = BasicSet(
        inequalities=(
            AffineConstraint(a=[1.0, 0.0], name='x1<=0'),
            AffineConstraint(a=[0.0, -1.0], name='x2>=0'),
            AffineConstraint(a=[1.0, 1.0], c=1.0, name='x2<=-x1-t'),
        ),
        name='esquerda',
    )
    return PiecewiseDomain((right, left), name='wedge')


def parabola_domain() -> PiecewiseDomain:
    piece = BasicSet(
        inequalities=(
            AffineConstraint(a=[0.0, -1.0], name='x2>=0'),
            QuadraticConstraint(Q=[[-1.0, 0.0], [0.0, 0.0]], a=[0.0, 1.0], c=1.0, name='x2<=x1^2-t'),
        ),
        name='parabola',
    )
    return PiecewiseDomain((piece,), name='parabola')


def unit_disk_domain() -> PiecewiseDomain:
    disk = BasicSet(inequalities=(QuadraticConstraint(Q=[[1.0, 0.0], [0.0, 1.0]], d=-1.0, name='|x|<=1'),),
                    name='disco')
    return PiecewiseDomain((disk,), name='disk')


def half_plane_domain() -> PiecewiseDomain:
    """{x₂ <= 0}: o valor da restrição é a própria distância"""
    half = BasicSet(inequalities=(AffineConstraint(a=[0.0, 1.0], name='x2<=0'),), name='semiplano')
    return PiecewiseDomain((half,), name='half-plane')


def half_line_domain(bound: float = 1.0) -> PiecewiseDomain:
    """{x <= bound} em R¹, estático"""
    half = BasicSet(inequalities=(AffineConstraint(a=[1.0], d=-bound, name='x<=b'),), name='semirreta')
    return PiecewiseDomain((half,), name='half-line')


def moving_wall_domain(speed: float = 1.0) -> PiecewiseDomain:
    """{x <= speed·t} em R¹"""
    wall = BasicSet(inequalities=(AffineConstraint(a=[1.0], c=-speed, name='x<=t'),), name='parede')
    return PiecewiseDomain((wall,), name='moving-wall')
