from django.urls import path, include
from rest_framework.routers import DefaultRouter
from .views import SynthesisRunViewSet, SynthesizeView, VerifyView

router = DefaultRouter()
router.register(r'runs', SynthesisRunViewSet, basename='run')

urlpatterns = [
    path('', include(router.urls)),

    # ── Synthesis / verification ─────────────────
    path('verify/',     VerifyView.as_view(),     name='api_verify'),
    path('synthesize/', SynthesizeView.as_view(), name='api_synthesize'),
]
