"""
周辺和を固定した二値行列の逐次重点サンプリング
"""
__version__ = "1.0.0"
