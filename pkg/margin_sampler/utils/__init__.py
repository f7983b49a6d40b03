"""
ユーティリティパッケージ
"""
