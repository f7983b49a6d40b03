"""
データモデルパッケージ
"""
