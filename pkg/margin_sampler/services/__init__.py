"""
サービス層パッケージ
"""
